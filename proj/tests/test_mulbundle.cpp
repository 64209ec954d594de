#include <catch2/catch_amalgamated.hpp>

#include "sgeom/mulbundle.hpp"
#include "sgeom/random_gen.hpp"

using namespace sgeom;

namespace {

// Flattens a trivial-bundle transition into one rational map on the
// coordinates (base, axes in mask order).
RationalMap transition_as_map(const BundleTransition& tr) {
    const int p = tr.base.arity();
    std::vector<std::pair<IndexMask, int>> axes(tr.fiber.source.dims.begin(),
                                                tr.fiber.source.dims.end());
    int total = p;
    std::map<IndexMask, int> offset;
    for (const auto& [m, d] : axes) {
        offset[m] = total;
        total += d;
    }
    std::vector<int> base_image(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) base_image[static_cast<std::size_t>(i)] = i;

    std::vector<RatFunc> comps;
    for (int o = 0; o < tr.base.codim(); ++o)
        comps.push_back(tr.base.comp(o).remap(total, base_image));

    std::map<IndexMask, std::vector<RatFunc>> out_comp;
    for (const auto& [m, d] : tr.fiber.target.dims)
        out_comp[m].assign(static_cast<std::size_t>(d), RatFunc(total));
    for (const auto& [key, tensor] : tr.fiber.family) {
        IndexMask total_mask = 0;
        for (IndexMask m : key) total_mask |= m;
        std::vector<int> idx(key.size(), 0);
        bool more = !idx.empty();
        while (more) {
            RatFunc mon = RatFunc::constant(total, rat(1));
            for (std::size_t bi = 0; bi < key.size(); ++bi)
                mon *= RatFunc::variable(total, offset[key[bi]] + idx[bi]);
            for (int o = 0; o < tensor.out_dim; ++o) {
                const RatFunc& e = tensor.at(idx, o);
                if (!e.is_zero())
                    out_comp[total_mask][static_cast<std::size_t>(o)] +=
                        mon * e.remap(total, base_image);
            }
            more = detail::next_args(idx, tensor.arg_dims);
        }
    }
    for (const auto& [m, vec] : out_comp)
        for (const auto& c : vec) comps.push_back(c);
    return RationalMap(total, std::move(comps));
}

// One tangent doubling of a plain rational map: (F(x), dF(x) y).
RationalMap tangent_plain(const RationalMap& f) {
    const int m = f.arity();
    std::vector<int> image(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) image[static_cast<std::size_t>(i)] = i;
    std::vector<RatFunc> comps;
    for (int o = 0; o < f.codim(); ++o) comps.push_back(f.comp(o).remap(2 * m, image));
    for (int o = 0; o < f.codim(); ++o) {
        RatFunc acc(2 * m);
        for (int v = 0; v < m; ++v)
            acc += RatFunc::variable(2 * m, m + v) * f.comp(o).partial(v).remap(2 * m, image);
        comps.push_back(acc);
    }
    return RationalMap(2 * m, std::move(comps));
}

} // namespace

TEST_CASE("first tangent is the pair (phi, d phi)") {
    Rng rng(61);
    auto phi = rng.poly_map(2, 2, 3);
    auto t = higher_tangent(phi, 1);
    CHECK(rmap_equal(transition_as_map(t), tangent_plain(phi)));
}

TEST_CASE("second tangent of the squaring map") {
    auto x = Polynomial::variable(1, 0);
    RationalMap phi(1, {RatFunc::from_poly(x * x)});
    auto t = higher_tangent(phi, 2);
    // components x^2, 2x v1, 2x v2, 2x v12 + 2 v1 v2
    const CubeTensor* t1 = t.fiber.find(PartitionKey{0b01});
    REQUIRE(t1 != nullptr);
    CHECK(t1->at({0}, 0) == RatFunc::from_poly(rat(2) * x));
    const CubeTensor* t12 = t.fiber.find(PartitionKey{0b11});
    REQUIRE(t12 != nullptr);
    CHECK(t12->at({0}, 0) == RatFunc::from_poly(rat(2) * x));
    const CubeTensor* tsplit = t.fiber.find(PartitionKey{0b01, 0b10});
    REQUIRE(tsplit != nullptr);
    CHECK(tsplit->at({0, 0}, 0) == RatFunc::constant(1, rat(2)));
}

TEST_CASE("iterated tangent oracle") {
    Rng rng(62);
    for (int rep = 0; rep < 6; ++rep) {
        auto phi = rng.poly_map(1, 1, 3);
        auto t2 = higher_tangent(phi, 2);
        auto iterated = tangent_plain(tangent_plain(phi));
        CHECK(rmap_equal(transition_as_map(t2), iterated));
    }
    // and once at two base dimensions
    auto phi2 = rng.poly_map(2, 1, 2);
    CHECK(rmap_equal(transition_as_map(higher_tangent(phi2, 2)),
                     tangent_plain(tangent_plain(phi2))));
}

TEST_CASE("higher tangent chain rule") {
    Rng rng(63);
    for (int k = 1; k <= 3; ++k) {
        for (int rep = 0; rep < 4; ++rep) {
            auto phi = rng.poly_map(1, 2, 2);
            auto psi = rng.poly_map(2, 1, 2);
            auto composite = higher_tangent(psi.after(phi), k);
            auto chained = transition_compose(higher_tangent(psi, k), higher_tangent(phi, k));
            CHECK(rmap_equal(composite.base, chained.base));
            CHECK(composite.fiber == chained.fiber);
        }
    }
}

TEST_CASE("higher tangent maps axes into axes") {
    Rng rng(64);
    auto phi = rng.poly_map(2, 2, 2);
    auto t = higher_tangent(phi, 3);
    // structural support: the component on axis I uses only partitions of I
    for (const auto& [key, tensor] : t.fiber.family) {
        IndexMask total = 0;
        int card = 0;
        for (IndexMask m : key) {
            total |= m;
            card += mask_card(m);
        }
        CHECK(card == mask_card(total));
    }
    // pointwise: a point supported on one axis maps into that axis
    for (IndexMask axis = 1; axis < 8; axis <<= 1) {
        CubePoint v;
        v[axis] = rng.vector(2);
        auto out = cube_apply(t.fiber.at_base(rng.vector(2)), v);
        for (const auto& [m, vec] : out) CHECK(m == axis);
    }
}

TEST_CASE("tangent of a transition is functorial") {
    Rng rng(65);
    auto id_tr = higher_tangent(RationalMap::identity(2), 2);
    auto tid = tangent_of_morphism(id_tr);
    // T of the identity transition is the identity on the doubled bundle
    CHECK(rmap_equal(tid.base, RationalMap::identity(4)));
    CHECK(tid.fiber == CubeMorphism::identity(tid.fiber.source, 4));

    for (int rep = 0; rep < 4; ++rep) {
        auto phi = rng.poly_map(1, 1, 2);
        auto psi = rng.poly_map(1, 1, 2);
        auto f = higher_tangent(phi, 2);
        auto g = higher_tangent(psi, 2);
        auto lhs = tangent_of_morphism(transition_compose(g, f));
        auto rhs = transition_compose(tangent_of_morphism(g), tangent_of_morphism(f));
        CHECK(rmap_equal(lhs.base, rhs.base));
        CHECK(lhs.fiber == rhs.fiber);
    }
}

TEST_CASE("tangent commutes with restriction") {
    Rng rng(66);
    auto phi = rng.poly_map(1, 1, 2);
    auto f = higher_tangent(phi, 3);
    auto lhs = project_transition(tangent_of_morphism(f), 2);
    auto rhs = tangent_of_morphism(project_transition(f, 2));
    CHECK(rmap_equal(lhs.base, rhs.base));
    CHECK(lhs.fiber == rhs.fiber);
}

TEST_CASE("projections compose and commute with transitions") {
    Rng rng(67);
    auto phi = rng.poly_map(1, 1, 3);
    auto t4 = higher_tangent(phi, 4);
    CubePoint v;
    for (IndexMask m = 1; m < 16; ++m) v[m] = rng.vector(1);

    CHECK(project_point(project_point(v, 3), 2) == project_point(v, 2));
    CHECK(project_point(v, 4) == v);
    CHECK(project_point(v, 0).empty());

    // naturality: truncating the transition then applying equals applying
    // then truncating
    RatVector x = {rat(2)};
    auto full = cube_apply(t4.fiber.at_base(x), v);
    auto t2 = project_transition(t4, 2);
    auto lhs = cube_apply(t2.fiber.at_base(x), project_point(v, 2));
    CHECK(lhs == project_point(full, 2));
}

TEST_CASE("truncated points extend by zeros on trivial bundles") {
    Rng rng(69);
    CubePoint low;
    low[0b01] = {rat(2)};
    low[0b10] = {rat(-1)};
    low[0b11] = {rat(3)};
    // any degree-2 point is the projection of its zero extension at degree 4
    CubePoint extended = low; // absent components are zero
    CHECK(project_point(extended, 2) == low);
    auto phi = rng.poly_map(1, 1, 2);
    auto t4 = higher_tangent(phi, 4);
    auto t2 = higher_tangent(phi, 2);
    RatVector x = {rat(1)};
    auto full = cube_apply(t4.fiber.at_base(x), extended);
    CHECK(project_point(full, 2) == cube_apply(t2.fiber.at_base(x), low));
}

TEST_CASE("limit elements and maps") {
    Rng rng(68);
    auto phi = rng.poly_map(1, 1, 2);
    const int levels = 4;

    // constant family lifted from level zero is coherent
    TruncatedLimitElement e;
    e.levels = levels;
    e.base = {rat(1)};
    CubePoint top;
    for (IndexMask m = 1; m < (IndexMask(1) << levels); ++m) top[m] = {rng.nonzero_rational()};
    for (int k = 0; k <= levels; ++k) e.points.push_back(project_point(top, k));
    CHECK(limit_check(e));

    // an incoherent element is rejected
    TruncatedLimitElement bad = e;
    bad.points[1][0b1] = {rat(99)};
    CHECK_FALSE(limit_check(bad));
    std::vector<BundleTransition> idfam;
    for (int k = 0; k <= levels; ++k) idfam.push_back(higher_tangent(RationalMap::identity(1), k));
    CHECK_THROWS_AS(limit_map(idfam, bad), domain_error);

    // the identity family fixes coherent elements
    auto fixed = limit_map(idfam, e);
    CHECK(fixed.base == e.base);
    for (int k = 0; k <= levels; ++k) CHECK(fixed.points[static_cast<std::size_t>(k)] ==
                                            e.points[static_cast<std::size_t>(k)]);

    // higher tangent families map coherent to coherent
    std::vector<BundleTransition> fam;
    for (int k = 0; k <= levels; ++k) fam.push_back(higher_tangent(phi, k));
    auto image = limit_map(fam, e);
    CHECK(limit_check(image));
    CHECK(image.base == phi.eval(e.base));

    // a family that fails the intertwining condition is rejected
    auto broken = fam;
    broken[2] = higher_tangent(rng.poly_map(1, 1, 2), 2);
    CHECK_THROWS_AS(limit_map(broken, e), domain_error);
}

TEST_CASE("bundle minus functor") {
    // two charts on the positive line, transition x -> 1/x
    auto x = Polynomial::variable(1, 0);
    RationalMap inv_map(1, {RatFunc(Polynomial::constant(1, rat(1)), x)});
    DomainBox box({Interval{rat(1, 2), rat(2), false, false}});

    auto mk_bundle = [&](int degree) {
        LocalMultilinearBundle b;
        b.degree = degree;
        b.base_dim = 1;
        b.charts = {"a", "b"};
        b.boxes["a"] = box;
        b.boxes["b"] = box;
        b.overlaps[{"a", "b"}] = box;
        b.overlaps[{"b", "a"}] = box;
        std::set<IndexMask> evens;
        for (IndexMask m = 1; m < (IndexMask(1) << degree); ++m)
            if (mask_even(m)) evens.insert(m);
        auto tr = higher_tangent(inv_map, degree);
        BundleTransition even_tr{tr.base, cube_restrict(tr.fiber, evens)};
        b.fiber = even_tr.fiber.source;
        b.transitions[{"a", "b"}] = even_tr;
        b.transitions[{"b", "a"}] = even_tr;
        return b;
    };

    auto b2 = mk_bundle(2);
    CHECK(validate_bundle(b2).pass);
    // degree 2: only sign +1 partitions exist, so minus changes nothing
    auto m2 = bundle_minus_even(b2);
    for (const auto& [pair, tr] : m2.transitions)
        CHECK(tr.fiber == b2.transitions.at(pair).fiber);

    auto b4 = mk_bundle(4);
    REQUIRE(validate_bundle(b4).pass);
    auto m4 = bundle_minus_even(b4);
    CHECK(validate_bundle(m4).pass); // cocycle preserved by functoriality
    // involutive
    auto back = bundle_minus_even(m4);
    for (const auto& [pair, tr] : back.transitions)
        CHECK(tr.fiber == b4.transitions.at(pair).fiber);
    // and the minus of the mixed pairing really flips
    const CubeTensor* orig = b4.transitions.at({"a", "b"}).fiber.find(PartitionKey{0b0101, 0b1010});
    const CubeTensor* flipped = m4.transitions.at({"a", "b"}).fiber.find(PartitionKey{0b0101, 0b1010});
    REQUIRE(orig != nullptr);
    REQUIRE(flipped != nullptr);
    CHECK(flipped->entries[0] == -orig->entries[0]);

    // non-even bundles are rejected
    LocalMultilinearBundle odd_bundle;
    odd_bundle.degree = 1;
    odd_bundle.base_dim = 1;
    odd_bundle.fiber = CubeSpace::uniform(1, 1);
    CHECK_THROWS_AS(bundle_minus_even(odd_bundle), domain_error);
}

TEST_CASE("bundle validation reports failures with witnesses") {
    auto x = Polynomial::variable(1, 0);
    RationalMap inv_map(1, {RatFunc(Polynomial::constant(1, rat(1)), x)});
    DomainBox box({Interval{rat(1, 2), rat(2), false, false}});
    LocalMultilinearBundle b;
    b.degree = 1;
    b.base_dim = 1;
    b.charts = {"a", "b"};
    b.boxes["a"] = box;
    b.boxes["b"] = box;
    b.overlaps[{"a", "b"}] = box;
    b.overlaps[{"b", "a"}] = box;
    auto tr = higher_tangent(inv_map, 1);
    b.fiber = tr.fiber.source;
    b.transitions[{"a", "b"}] = tr;
    b.transitions[{"b", "a"}] = tr;
    CHECK(validate_bundle(b).pass);

    // perturb the way back
    auto broken = b;
    broken.transitions[{"b", "a"}].base = RationalMap::identity(1);
    auto rep = validate_bundle(broken);
    CHECK_FALSE(rep.pass);
    CHECK_FALSE(rep.witnesses.empty());
}
