#include <catch2/catch_amalgamated.hpp>

#include "sgeom/mulspace.hpp"
#include "sgeom/random_gen.hpp"

using namespace sgeom;

namespace {

CubeMorphism random_cube_morphism(Rng& rng, const CubeSpace& src, const CubeSpace& tgt,
                                  bool even_only = false) {
    CubeMorphism m(src, tgt, 0);
    for (const auto& [mask, dtot] : src.dims) {
        if (even_only && !mask_even(mask)) continue;
        if (tgt.dim(mask) == 0) continue;
        for (const auto& nu : enumerate_partitions(mask_to_indices(mask))) {
            if (even_only && !nu.all_blocks_even()) continue;
            PartitionKey key = partition_key(nu, 32);
            std::vector<int> dims;
            bool empty = false;
            for (IndexMask b : key) {
                dims.push_back(src.dim(b));
                if (src.dim(b) == 0) empty = true;
            }
            if (empty) continue;
            CubeTensor t(dims, tgt.dim(mask), 0);
            for (auto& e : t.entries) e = RatFunc::constant(0, rng.rational(2));
            m.set(key, std::move(t));
        }
    }
    return m;
}

CubePoint random_cube_point(Rng& rng, const CubeSpace& sp) {
    CubePoint v;
    for (const auto& [mask, d] : sp.dims)
        if (d > 0) v[mask] = rng.vector(d);
    return v;
}

CubeMorphism random_invertible(Rng& rng, const CubeSpace& sp) {
    // start from a random morphism and overwrite the length-one tensors
    // with unit upper-triangular matrices
    CubeMorphism m = random_cube_morphism(rng, sp, sp);
    for (const auto& [mask, d] : sp.dims) {
        if (d == 0) {
            m.family.erase(PartitionKey{mask});
            continue;
        }
        CubeTensor t({d}, d, 0);
        for (int i = 0; i < d; ++i) {
            t.at({i}, i) = RatFunc::constant(0, rat(1));
            for (int o = 0; o < i; ++o) t.at({i}, o) = RatFunc::constant(0, rng.rational(2));
        }
        m.family[PartitionKey{mask}] = std::move(t);
    }
    return m;
}

} // namespace

TEST_CASE("identity and zero morphisms") {
    auto sp = CubeSpace::uniform(2, 2);
    auto id = CubeMorphism::identity(sp);
    Rng rng(41);
    auto v = random_cube_point(rng, sp);
    CHECK(cube_apply(id, v) == v);

    CubeMorphism zero(sp, sp, 0);
    CHECK(cube_apply(zero, v).empty());
}

TEST_CASE("bilinear component fills the top axis") {
    auto sp = CubeSpace::uniform(2, 1);
    CubeMorphism f(sp, sp, 0);
    CubeTensor t({1, 1}, 1, 0);
    t.at({0, 0}, 0) = RatFunc::constant(0, rat(3));
    f.set(PartitionKey{0b01, 0b10}, std::move(t));
    CubePoint v;
    v[0b01] = {rat(2)};
    v[0b10] = {rat(5)};
    v[0b11] = {rat(7)};
    auto out = cube_apply(f, v);
    REQUIRE(out.count(0b11) == 1);
    CHECK(out.at(0b11) == RatVector{rat(30)});
    CHECK(out.size() == 1);
}

TEST_CASE("composition against the pointwise oracle") {
    Rng rng(42);
    for (int rep = 0; rep < 10; ++rep) {
        auto sp = CubeSpace::uniform(3, static_cast<int>(rng.pick(1, 2)));
        auto f = random_cube_morphism(rng, sp, sp);
        auto g = random_cube_morphism(rng, sp, sp);
        auto h = cube_compose(g, f);
        for (int k = 0; k < 3; ++k) {
            auto v = random_cube_point(rng, sp);
            CHECK(cube_apply(h, v) == cube_apply(g, cube_apply(f, v)));
        }
        CHECK(cube_compose(g, CubeMorphism::identity(sp)) == g);
        CHECK(cube_compose(CubeMorphism::identity(sp), g) == g);
    }
}

TEST_CASE("composition is associative on small cubes") {
    Rng rng(43);
    for (int k = 2; k <= 3; ++k) {
        auto sp = CubeSpace::uniform(k, 2);
        auto f = random_cube_morphism(rng, sp, sp);
        auto g = random_cube_morphism(rng, sp, sp);
        auto h = random_cube_morphism(rng, sp, sp);
        CHECK(cube_compose(h, cube_compose(g, f)) == cube_compose(cube_compose(h, g), f));
    }
}

TEST_CASE("length-one support is closed under composition") {
    Rng rng(44);
    for (int k = 2; k <= 4; ++k) {
        auto sp = CubeSpace::uniform(k, 1);
        auto strip = [&](CubeMorphism m) {
            for (auto it = m.family.begin(); it != m.family.end();)
                if (it->first.size() > 1)
                    it = m.family.erase(it);
                else
                    ++it;
            return m;
        };
        auto f = strip(random_cube_morphism(rng, sp, sp));
        auto g = strip(random_cube_morphism(rng, sp, sp));
        auto h = cube_compose(g, f);
        for (const auto& [key, t] : h.family) CHECK(key.size() == 1);
    }
}

TEST_CASE("inversion criterion and inverse") {
    Rng rng(45);
    auto sp = CubeSpace::uniform(2, 2);

    auto id = CubeMorphism::identity(sp);
    auto inv_id = cube_invert(id);
    REQUIRE(inv_id.invertible);
    CHECK(*inv_id.inverse == id);

    // singular length-one block refuses
    CubeMorphism sing = CubeMorphism::identity(sp);
    CubeTensor t({2}, 2, 0);
    t.at({0}, 0) = RatFunc::constant(0, rat(1));
    t.at({1}, 0) = RatFunc::constant(0, rat(2)); // rank one
    t.at({0}, 1) = RatFunc::constant(0, rat(2));
    t.at({1}, 1) = RatFunc::constant(0, rat(4));
    sing.family[PartitionKey{0b01}] = t;
    auto res = cube_invert(sing);
    CHECK_FALSE(res.invertible);

    // the singular block produces an honest collision of cube_apply
    Matrix<Rational> m2 = {{rat(1), rat(2)}, {rat(2), rat(4)}};
    auto kvec = kernel_vector(m2);
    REQUIRE(kvec.has_value());
    CubePoint v0, v1;
    v1[0b01] = *kvec;
    CHECK(cube_apply(sing, v0) == cube_apply(sing, v1));

    for (int rep = 0; rep < 8; ++rep) {
        auto f = random_invertible(rng, sp);
        auto inv = cube_invert(f);
        REQUIRE(inv.invertible);
        CHECK(cube_compose(*inv.inverse, f) == CubeMorphism::identity(sp));
        CHECK(cube_compose(f, *inv.inverse) == CubeMorphism::identity(sp));
        for (int k = 0; k < 2; ++k) {
            auto v = random_cube_point(rng, sp);
            CHECK(cube_apply(*inv.inverse, cube_apply(f, v)) == v);
        }
    }
}

TEST_CASE("inversion on degree 3 with mixed dimensions") {
    Rng rng(46);
    auto sp = CubeSpace::uniform(3, 1);
    sp.set_dim(0b111, 2);
    for (int rep = 0; rep < 4; ++rep) {
        auto f = random_invertible(rng, sp);
        auto inv = cube_invert(f);
        REQUIRE(inv.invertible);
        CHECK(cube_compose(*inv.inverse, f) == CubeMorphism::identity(sp));
        CHECK(cube_compose(f, *inv.inverse) == CubeMorphism::identity(sp));
    }
}

TEST_CASE("restriction needs a subalgebra-closed axis set") {
    auto sp = CubeSpace::uniform(3, 1);
    Rng rng(47);
    auto f = random_cube_morphism(rng, sp, sp);

    // degree truncation is closed
    std::set<IndexMask> p2 = {0b001, 0b010, 0b011};
    auto r = cube_restrict(f, p2);
    for (const auto& [key, t] : r.family)
        for (IndexMask m : key) CHECK(p2.count(m) == 1);

    // the even subsets are closed
    std::set<IndexMask> evens = {0b011, 0b101, 0b110};
    CHECK_NOTHROW(cube_restrict(f, evens));

    // {1}, {2} without {1,2} is not closed
    std::set<IndexMask> bad = {0b001, 0b010};
    CHECK_THROWS_AS(cube_restrict(f, bad), domain_error);
}

TEST_CASE("restriction is functorial") {
    Rng rng(48);
    auto sp = CubeSpace::uniform(3, 2);
    std::set<IndexMask> p = {0b001, 0b010, 0b011};
    for (int rep = 0; rep < 5; ++rep) {
        auto f = random_cube_morphism(rng, sp, sp);
        auto g = random_cube_morphism(rng, sp, sp);
        CHECK(cube_restrict(cube_compose(g, f), p) ==
              cube_compose(cube_restrict(g, p), cube_restrict(f, p)));
    }
}

TEST_CASE("degree truncation matches restriction") {
    Rng rng(49);
    auto sp = CubeSpace::uniform(3, 2);
    auto f = random_cube_morphism(rng, sp, sp);
    auto t = cube_truncate(f, 2);
    CHECK(t.source.degree == 2);
    for (const auto& [key, tensor] : t.family) {
        PartitionKey same = key;
        const CubeTensor* orig = f.find(same);
        REQUIRE(orig != nullptr);
        CHECK(*orig == tensor);
    }
}

TEST_CASE("minus functor signs") {
    // k = 2: the only partitions of {1,2} with even blocks have sign +1
    auto sp2 = CubeSpace(2);
    sp2.set_dim(0b11, 2);
    Rng rng(50);
    auto f2 = random_cube_morphism(rng, sp2, sp2, true);
    CHECK(minus_functor(f2) == f2);

    // k = 4: the pairing {{1,3},{2,4}} flips
    CHECK(key_sign(PartitionKey{0b0101, 0b1010}) == -1);
    auto sp4 = CubeSpace(4);
    for (auto& [m, d] : sp4.dims) d = mask_even(m) ? 1 : 0;
    auto f4 = random_cube_morphism(rng, sp4, sp4, true);
    auto m4 = minus_functor(f4);
    const CubeTensor* orig = f4.find(PartitionKey{0b0101, 0b1010});
    const CubeTensor* flip = m4.find(PartitionKey{0b0101, 0b1010});
    if (orig) {
        REQUIRE(flip != nullptr);
        for (std::size_t i = 0; i < orig->entries.size(); ++i)
            CHECK(flip->entries[i] == -orig->entries[i]);
    }

    // involution
    CHECK(minus_functor(m4) == f4);

    // non-even cubes are rejected
    auto spo = CubeSpace::uniform(2, 1);
    auto fo = random_cube_morphism(rng, spo, spo);
    CHECK_THROWS_AS(minus_functor(fo), domain_error);
}

TEST_CASE("minus functor is functorial on even morphisms") {
    Rng rng(51);
    for (int k = 2; k <= 4; ++k) {
        CubeSpace sp(k);
        for (auto& [m, d] : sp.dims) d = mask_even(m) ? 2 : 0;
        for (int rep = 0; rep < 4; ++rep) {
            auto f = random_cube_morphism(rng, sp, sp, true);
            auto g = random_cube_morphism(rng, sp, sp, true);
            CHECK(minus_functor(cube_compose(g, f)) ==
                  cube_compose(minus_functor(g), minus_functor(f)));
        }
    }
}

TEST_CASE("product morphisms act blockwise") {
    Rng rng(52);
    auto spa = CubeSpace::uniform(2, 1);
    auto spb = CubeSpace::uniform(2, 2);
    auto f = random_cube_morphism(rng, spa, spa);
    auto g = random_cube_morphism(rng, spb, spb);
    auto fg = cube_product(f, g);
    auto va = random_cube_point(rng, spa);
    auto vb = random_cube_point(rng, spb);
    CubePoint vab;
    for (const auto& [m, d] : fg.source.dims) {
        RatVector v = va.count(m) ? va[m] : zero_vector(spa.dim(m));
        RatVector w = vb.count(m) ? vb[m] : zero_vector(spb.dim(m));
        v.insert(v.end(), w.begin(), w.end());
        vab[m] = v;
    }
    auto out = cube_apply(fg, vab);
    auto oa = cube_apply(f, va);
    auto ob = cube_apply(g, vb);
    for (const auto& [m, d] : fg.target.dims) {
        RatVector expect = oa.count(m) ? oa[m] : zero_vector(spa.dim(m));
        RatVector w = ob.count(m) ? ob[m] : zero_vector(spb.dim(m));
        expect.insert(expect.end(), w.begin(), w.end());
        RatVector got = out.count(m) ? out[m] : zero_vector(fg.target.dim(m));
        CHECK(got == expect);
    }
}

TEST_CASE("derivative of application follows the sum-over-slots rule") {
    Rng rng(53);
    auto sp = CubeSpace::uniform(2, 2);
    auto f = random_cube_morphism(rng, sp, sp);
    auto v = random_cube_point(rng, sp);
    auto w = random_cube_point(rng, sp);
    // exact derivative by interpolation: f(v + t w) is quadratic in t, so
    // three samples pin the linear coefficient
    auto at_t = [&](long t) {
        CubePoint shifted;
        for (const auto& [m, d] : sp.dims) {
            RatVector a = v.count(m) ? v.at(m) : zero_vector(d);
            RatVector b = w.count(m) ? w.at(m) : zero_vector(d);
            shifted[m] = a + rat(t) * b;
        }
        return cube_apply(f, shifted);
    };
    auto p0 = at_t(0), p1 = at_t(1), p2 = at_t(2);
    // linear coefficient of a quadratic through t = 0, 1, 2
    for (const auto& [m, d] : sp.dims) {
        RatVector a0 = p0.count(m) ? p0.at(m) : zero_vector(d);
        RatVector a1 = p1.count(m) ? p1.at(m) : zero_vector(d);
        RatVector a2 = p2.count(m) ? p2.at(m) : zero_vector(d);
        RatVector deriv(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i)
            deriv[static_cast<std::size_t>(i)] =
                rat(-3, 2) * a0[static_cast<std::size_t>(i)] +
                rat(2) * a1[static_cast<std::size_t>(i)] +
                rat(-1, 2) * a2[static_cast<std::size_t>(i)];
        // sum over slots: every tensor slot replaced once by w
        RatVector expect = zero_vector(d);
        for (const auto& [key, tensor] : f.family) {
            if (f.key_union(key) != m) continue;
            for (std::size_t slot = 0; slot < key.size(); ++slot) {
                std::vector<const RatVector*> args;
                bool dead = false;
                static RatVector scratch;
                std::vector<RatVector> storage;
                for (std::size_t bi = 0; bi < key.size(); ++bi) {
                    const CubePoint& src = bi == slot ? w : v;
                    auto it = src.find(key[bi]);
                    storage.push_back(it != src.end() ? it->second
                                                      : zero_vector(f.source.dim(key[bi])));
                }
                std::vector<int> idx(key.size(), 0);
                std::vector<int> dims;
                for (IndexMask b : key) dims.push_back(f.source.dim(b));
                bool more = true;
                while (more && !dead) {
                    Rational coeff(1);
                    for (std::size_t bi = 0; bi < key.size(); ++bi)
                        coeff *= storage[bi][static_cast<std::size_t>(idx[bi])];
                    if (sgn(coeff) != 0)
                        for (int o = 0; o < d; ++o)
                            expect[static_cast<std::size_t>(o)] +=
                                coeff * tensor.at(idx, o).constant_value();
                    more = detail::next_args(idx, dims);
                }
            }
        }
        CHECK(deriv == expect);
    }
}

TEST_CASE("base-parametrized entries specialize and compose") {
    // one-variable base, entries depending on x
    auto sp = CubeSpace::uniform(2, 1);
    CubeMorphism f(sp, sp, 1);
    auto x = Polynomial::variable(1, 0);
    for (IndexMask m = 1; m < 4; ++m) {
        CubeTensor t({1}, 1, 1);
        t.at({0}, 0) = RatFunc::from_poly(x + Polynomial::constant(1, rat(1)));
        f.set(PartitionKey{m}, std::move(t));
    }
    CubeTensor t12({1, 1}, 1, 1);
    t12.at({0, 0}, 0) = RatFunc::from_poly(x * x);
    f.set(PartitionKey{0b01, 0b10}, std::move(t12));

    auto at2 = f.at_base({rat(2)});
    CHECK(at2.base_arity == 0);
    CHECK(at2.find(PartitionKey{0b01})->at({0}, 0).constant_value() == rat(3));
    CHECK(at2.find(PartitionKey{0b01, 0b10})->at({0, 0}, 0).constant_value() == rat(4));

    // precompose with a base map y -> y^2
    RationalMap phi(1, {RatFunc::from_poly(Polynomial::variable(1, 0) * Polynomial::variable(1, 0))});
    auto pre = f.precompose_base(phi);
    CHECK(pre.find(PartitionKey{0b01})->at({0}, 0) ==
          RatFunc::from_poly(Polynomial::variable(1, 0) * Polynomial::variable(1, 0) +
                             Polynomial::constant(1, rat(1))));
}
