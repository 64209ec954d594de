#include <catch2/catch_amalgamated.hpp>

#include "sgeom/json_io.hpp"
#include "sgeom/random_gen.hpp"

using namespace sgeom;
using namespace sgeom::jio;

TEST_CASE("rational literals round-trip") {
    CHECK(decode_rational(encode(rat(-7, 3))) == rat(-7, 3));
    CHECK(decode_rational(Json("4/6")) == rat(2, 3));
    CHECK_THROWS_AS(decode_rational(Json("a/b")), parse_error);
    CHECK_THROWS_AS(decode_rational(Json(3)), parse_error);
}

TEST_CASE("polynomials and maps round-trip") {
    Rng rng(91);
    for (int rep = 0; rep < 10; ++rep) {
        auto p = rng.polynomial(3, 3);
        CHECK(decode_polynomial(encode(p), 3) == p);
    }
    // common-denominator encoding reproduces the map exactly
    auto x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
    RationalMap m(2, {RatFunc(Polynomial::constant(2, rat(1)), x),
                      RatFunc(y, x * x + Polynomial::constant(2, rat(1)))});
    auto m2 = decode_rational_map(encode(m));
    CHECK(m2 == m);
    // parse-emit identity on the canonical document
    CHECK(encode(m2) == encode(m));
}

TEST_CASE("grassmann documents round-trip") {
    Rng rng(92);
    for (int rep = 0; rep < 10; ++rep) {
        auto e = rng.grassmann(4);
        CHECK(decode_grassmann(encode(e)) == e);
        auto rho = rng.grassmann_morphism(3, 4);
        CHECK(decode_grassmann_morphism(encode(rho)) == rho);
    }
    CHECK_THROWS_AS(decode_grassmann(Json{{"n", 20}, {"coeffs", Json::array()}}),
                    dimension_error);
}

TEST_CASE("boxes and points round-trip") {
    DomainBox all;
    CHECK(decode_box(encode(all)) == all);
    DomainBox b({Interval{rat(1, 2), std::nullopt, false, true},
                 Interval{std::nullopt, rat(3), true, false}});
    CHECK(decode_box(encode(b)) == b);

    Rng rng(93);
    auto v = rng.point({2, 1}, 3);
    CHECK(decode_point(encode(v)) == v);
}

TEST_CASE("skeleton documents round-trip") {
    Rng rng(94);
    for (int rep = 0; rep < 6; ++rep) {
        auto f = rng.skeleton({2, 2}, {1, 2}, 2);
        f.box = DomainBox({Interval{rat(-1), rat(1), true, true},
                           Interval{std::nullopt, std::nullopt, true, true}});
        auto g = decode_skeleton(encode(f));
        CHECK(g.equal_data(f));
        CHECK(encode(g) == encode(f));
    }
    // the product declaration survives
    auto fam = rng.ufamily({1, 1}, {1, 1}, {1, 1}, 2);
    auto fam2 = decode_skeleton(encode(fam));
    REQUIRE(fam2.product.has_value());
    CHECK(fam2.product->first == fam.product->first);
}

TEST_CASE("cube documents round-trip") {
    Rng rng(95);
    auto sp = CubeSpace::uniform(3, 2);
    CHECK(decode_cube_space(encode(sp)) == sp);

    CubeMorphism m(sp, sp, 0);
    CubeTensor t({2, 2}, 2, 0);
    t.at({0, 1}, 0) = RatFunc::constant(0, rat(5));
    m.set(PartitionKey{0b001, 0b010}, std::move(t));
    auto m2 = decode_cube_morphism(encode(m));
    CHECK(m2 == m);

    // base-parametrized leaves
    CubeMorphism par(sp, sp, 1);
    CubeTensor pt({2}, 2, 1);
    pt.at({0}, 0) = RatFunc(Polynomial::variable(1, 0), Polynomial::constant(1, rat(1)) +
                                                            Polynomial::variable(1, 0));
    par.set(PartitionKey{0b001}, std::move(pt));
    auto par2 = decode_cube_morphism(encode(par));
    CHECK(par2 == par);
    CHECK(encode(par2) == encode(par));
}

TEST_CASE("atlas documents round-trip") {
    // the two-chart inversion atlas
    SuperAtlas a;
    a.model = SuperVectorSpace{1, 1};
    a.charts = {{"a", DomainBox({Interval{rat(1, 2), rat(3), false, false}})},
                {"b", DomainBox({Interval{rat(1, 3), rat(2), false, false}})}};
    DomainBox ov({Interval{rat(1, 2), rat(2), false, false}});
    a.overlaps[{"a", "b"}] = ov;
    a.overlaps[{"b", "a"}] = ov;
    auto x = Polynomial::variable(1, 0);
    Skeleton f(a.model, a.model, ov);
    f.set_base(RationalMap(1, {RatFunc(Polynomial::constant(1, rat(1)), x)}));
    f.comp(1).set({1}, RationalMap::constant(1, {rat(1)}));
    a.transitions.emplace(std::make_pair("a", "b"), f);
    a.transitions.emplace(std::make_pair("b", "a"), invert(f, f.base(), ov));

    auto a2 = decode_atlas(encode(a));
    CHECK(a2.model == a.model);
    CHECK(a2.charts.size() == 2);
    CHECK(a2.transitions.at({"a", "b"}).equal_data(a.transitions.at({"a", "b"})));
    CHECK(encode(a2) == encode(a));
    CHECK(cocycle_check(a2).pass);
}

TEST_CASE("bundle documents round-trip") {
    Rng rng(96);
    auto phi = rng.poly_map(1, 1, 2);
    LocalMultilinearBundle b;
    b.degree = 2;
    b.base_dim = 1;
    b.charts = {"u"};
    b.boxes["u"] = DomainBox();
    auto tr = higher_tangent(phi, 2);
    b.fiber = tr.fiber.source;
    b.overlaps[{"u", "u"}] = DomainBox();
    b.transitions[{"u", "u"}] = tr;
    auto b2 = decode_bundle(encode(b));
    CHECK(b2.degree == 2);
    CHECK(b2.transitions.at({"u", "u"}).fiber == tr.fiber);
    CHECK(encode(b2) == encode(b));
}

TEST_CASE("limit element documents round-trip") {
    TruncatedLimitElement e;
    e.levels = 2;
    e.base = {rat(1)};
    e.points.resize(3);
    e.points[1][0b1] = {rat(2)};
    e.points[2][0b1] = {rat(2)};
    e.points[2][0b11] = {rat(5)};
    auto e2 = decode_limit_element(encode(e));
    CHECK(e2.levels == e.levels);
    CHECK(e2.base == e.base);
    CHECK(e2.points[2] == e.points[2]);
    CHECK(limit_check(e2));
}

TEST_CASE("reports encode status and witnesses") {
    AtlasReport r;
    r.fail("something specific");
    auto j = encode_report(r);
    CHECK(j["status"] == "fail");
    CHECK(j["witness"].size() == 1);
}
