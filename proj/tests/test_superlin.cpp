#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sgeom/superlin.hpp"

using namespace sgeom;

namespace {

GrassmannElement random_even(std::mt19937_64& rng, int n) {
    GrassmannElement e(n);
    for (int t = 0; t < 3; ++t) {
        IndexMask m = static_cast<IndexMask>(rng() % (IndexMask(1) << n));
        if (!mask_even(m)) m &= m - 1; // drop one bit to make it even
        if (!mask_even(m)) continue;
        e.add(m, rat(static_cast<long>(rng() % 7) - 3));
    }
    return e;
}

SuperPoint random_point(std::mt19937_64& rng, SuperVectorSpace sp, int n) {
    SuperPoint p(sp, n);
    for (IndexMask m = 0; m < (IndexMask(1) << n); ++m) {
        int d = sp.parity_dim(mask_card(m));
        RatVector v;
        for (int i = 0; i < d; ++i) v.push_back(rat(static_cast<long>(rng() % 5) - 2));
        p.set(m, std::move(v));
    }
    return p;
}

GrassmannMorphism random_odd_morphism(std::mt19937_64& rng, int n_src, int n_tgt) {
    std::vector<GrassmannElement> imgs;
    for (int i = 0; i < n_src; ++i) {
        GrassmannElement e(n_tgt);
        for (int t = 0; t < 2; ++t) {
            IndexMask m = static_cast<IndexMask>(rng() % (IndexMask(1) << n_tgt));
            if (mask_even(m)) m |= 1; // force odd cardinality
            if (mask_even(m)) continue;
            e.add(m, rat(static_cast<long>(rng() % 5) - 2));
        }
        imgs.push_back(std::move(e));
    }
    return GrassmannMorphism(n_src, n_tgt, std::move(imgs));
}

} // namespace

TEST_CASE("module action unit and placement") {
    SuperVectorSpace sp{2, 1};
    SuperPoint v(sp, 3);
    v.set(0, {rat(1), rat(2)});
    v.set(0b001, {rat(5)});

    auto unit = GrassmannElement::scalar(3, rat(1));
    CHECK(module_action(unit, v) == v);

    // t = l1 l2 moves a real vector to the {1,2}-component
    SuperPoint e0(sp, 3);
    e0.set(0, {rat(3), rat(-1)});
    auto moved = module_action(GrassmannElement::basis(3, 0b011), e0);
    CHECK(moved.comp(0b011) == RatVector{rat(3), rat(-1)});
    CHECK(moved.comp(0) == zero_vector(2));
}

TEST_CASE("module action is associative over Grassmann multiplication") {
    std::mt19937_64 rng(3);
    SuperVectorSpace sp{2, 2};
    for (int rep = 0; rep < 30; ++rep) {
        auto t1 = random_even(rng, 3);
        auto t2 = random_even(rng, 3);
        auto v = random_point(rng, sp, 3);
        CHECK(module_action(t1, module_action(t2, v)) == module_action(t1 * t2, v));
    }
}

TEST_CASE("module action distributes over addition") {
    std::mt19937_64 rng(4);
    SuperVectorSpace sp{1, 2};
    for (int rep = 0; rep < 20; ++rep) {
        auto t = random_even(rng, 3);
        auto s = random_even(rng, 3);
        auto v = random_point(rng, sp, 3);
        auto w = random_point(rng, sp, 3);
        CHECK(module_action(t, v + w) == module_action(t, v) + module_action(t, w));
        CHECK(module_action(t + s, v) == module_action(t, v) + module_action(s, v));
    }
}

TEST_CASE("odd elements are rejected by the module action") {
    SuperVectorSpace sp{1, 1};
    SuperPoint v(sp, 2);
    CHECK_THROWS_AS(module_action(GrassmannElement::generator(2, 1), v), domain_error);
}

TEST_CASE("point morphisms: body projection and inclusion") {
    SuperVectorSpace sp{2, 1};
    std::mt19937_64 rng(9);
    auto v = random_point(rng, sp, 2);
    auto body = apply_point_morphism(eps_morphism(2, 0), v);
    CHECK(body.comp(0) == v.comp(0));
    CHECK(body.comps().size() <= 1);

    auto up = apply_point_morphism(eta_morphism(2, 3), v);
    for (const auto& [m, vec] : v.comps()) CHECK(up.comp(m) == vec);
    CHECK(up.level() == 3);
}

TEST_CASE("equivariance of point morphisms over the module action") {
    std::mt19937_64 rng(17);
    SuperVectorSpace sp{2, 2};
    for (int rep = 0; rep < 30; ++rep) {
        auto rho = random_odd_morphism(rng, 3, 3);
        auto t = random_even(rng, 3);
        auto v = random_point(rng, sp, 3);
        auto lhs = apply_point_morphism(rho, module_action(t, v));
        auto rhs = module_action(rho.apply(t), apply_point_morphism(rho, v));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("decomposition splits and recombines") {
    SuperVectorSpace sp{1, 1};
    SuperPoint v(sp, 3);
    v.set(0, {rat(4)});
    v.set(0b011, {rat(2)});     // even nilpotent
    v.set(0b100, {rat(-3)});    // odd
    auto d = decompose_point(v);
    CHECK(d.base == RatVector{rat(4)});
    CHECK(d.even_nilpotent.comp(0b011) == RatVector{rat(2)});
    CHECK(d.odd_part.comp(0b100) == RatVector{rat(-3)});

    auto rebuilt = d.even_nilpotent + d.odd_part;
    rebuilt.add(0, d.base);
    CHECK(rebuilt == v);

    SuperPoint pure = SuperPoint::real(sp, 2, {rat(7)});
    auto dp = decompose_point(pure);
    CHECK(dp.base == RatVector{rat(7)});
    CHECK(dp.even_nilpotent.is_zero());
    CHECK(dp.odd_part.is_zero());

    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 20; ++rep) {
        auto w = random_point(rng, SuperVectorSpace{2, 2}, 3);
        auto dw = decompose_point(w);
        auto back = dw.even_nilpotent + dw.odd_part;
        back.add(0, dw.base);
        CHECK(back == w);
    }
}

TEST_CASE("alternator is the identity for k = 1") {
    MultiTensor<Rational> t(1, 3, 1, rat(0));
    t.at({0}, 0) = rat(2);
    t.at({2}, 0) = rat(-5);
    CHECK(alternator(t) == t);
}

TEST_CASE("alternator kills symmetric bilinear input") {
    MultiTensor<Rational> t(2, 2, 1, rat(0));
    t.at({0, 1}, 0) = rat(3);
    t.at({1, 0}, 0) = rat(3);
    t.at({0, 0}, 0) = rat(7);
    auto a = alternator(t);
    for (const auto& e : a.entries) CHECK(e == rat(0));
}

TEST_CASE("alternator against the explicit permutation sum") {
    // f(v,w) = v1 w2 becomes (v1 w2 - v2 w1)/2
    MultiTensor<Rational> t(2, 2, 1, rat(0));
    t.at({0, 1}, 0) = rat(1);
    auto a = alternator(t);
    CHECK(a.at({0, 1}, 0) == rat(1, 2));
    CHECK(a.at({1, 0}, 0) == rat(-1, 2));
    CHECK(a.at({0, 0}, 0) == rat(0));
    CHECK(a.at({1, 1}, 0) == rat(0));
}

TEST_CASE("alternator is idempotent and fixes alternating tensors") {
    std::mt19937_64 rng(33);
    for (int k = 2; k <= 4; ++k) {
        MultiTensor<Rational> t(k, 3, 2, rat(0));
        for (auto& e : t.entries) e = rat(static_cast<long>(rng() % 9) - 4);
        auto once = alternator(t);
        CHECK(alternator(once) == once);
    }
}

TEST_CASE("alt component sign-sorted lookup") {
    AltComponent c(2, 3, 1, 1);
    RationalMap m(1, {RatFunc::variable(1, 0)});
    c.set({1, 3}, m);
    auto [s1, p1] = c.lookup({1, 3});
    CHECK(s1 == 1);
    REQUIRE(p1 != nullptr);
    auto [s2, p2] = c.lookup({3, 1});
    CHECK(s2 == -1);
    REQUIRE(p2 != nullptr);
    auto [s3, p3] = c.lookup({3, 3});
    CHECK(p3 == nullptr);
    auto [s4, p4] = c.lookup({1, 2});
    CHECK(p4 == nullptr);
}

TEST_CASE("alt component evaluation is alternating") {
    AltComponent c(2, 2, 0, 1);
    c.set({1, 2}, RationalMap::constant(0, {rat(1)}));
    std::vector<RatVector> cols = {{rat(2), rat(3)}, {rat(5), rat(7)}};
    auto mapper = [](const RationalMap& m) { return m.eval({}); };
    auto v = c.eval_columns<Rational>(cols, rat(0), mapper);
    CHECK(v[0] == rat(2) * rat(7) - rat(3) * rat(5));
    std::vector<RatVector> swapped = {cols[1], cols[0]};
    auto w = c.eval_columns<Rational>(swapped, rat(0), mapper);
    CHECK(w[0] == -v[0]);
}
