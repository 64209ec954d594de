#ifndef SGEOM_JSON_IO_HPP
#define SGEOM_JSON_IO_HPP

#include <json.hpp>

#include <algorithm>
#include <string>
#include <vector>

#include "sgeom/atlas.hpp"

namespace sgeom {

using Json = nlohmann::json;

namespace jio {

// ---- scalars -------------------------------------------------------------

inline Json encode(const Rational& r) { return rat_to_string(r); }

inline Rational decode_rational(const Json& j) {
    if (!j.is_string()) throw parse_error("rational literal must be a string");
    return rat_from_string(j.get<std::string>());
}

// ---- polynomials and rational maps ----------------------------------------

inline Json encode(const Polynomial& p) {
    Json terms = Json::array();
    for (const auto& [e, c] : p.terms()) {
        Json t;
        t["exps"] = e;
        t["c"] = encode(c);
        terms.push_back(std::move(t));
    }
    return terms;
}

inline Polynomial decode_polynomial(const Json& j, int nvars) {
    if (!j.is_array()) throw parse_error("polynomial must be an array of terms");
    Polynomial p(nvars);
    for (const auto& t : j) {
        if (!t.contains("exps") || !t.contains("c")) throw parse_error("malformed term");
        std::vector<unsigned> e = t["exps"].get<std::vector<unsigned>>();
        if (static_cast<int>(e.size()) != nvars) throw parse_error("term arity mismatch");
        p.add_term(std::move(e), decode_rational(t["c"]));
    }
    return p;
}

/// Vector-valued rational map with a common canonical denominator.
inline Json encode(const RationalMap& m) {
    Json j;
    j["arity"] = m.arity();
    // least common denominator across the components
    Polynomial den = Polynomial::constant(m.arity(), Rational(1));
    for (const auto& c : m.comps()) {
        Polynomial g = gcd(den, c.den());
        den = detail::divide_exact(den, g) * c.den();
    }
    Rational lc = den.leading_coeff();
    if (sgn(lc) != 0 && lc != Rational(1)) den = (Rational(1) / lc) * den;
    Json nums = Json::array();
    for (const auto& c : m.comps())
        nums.push_back(encode(c.num() * detail::divide_exact(den, c.den())));
    j["num"] = std::move(nums);
    j["den"] = encode(den);
    return j;
}

inline RationalMap decode_rational_map(const Json& j) {
    if (!j.contains("arity") || !j.contains("num") || !j.contains("den"))
        throw parse_error("rational map needs arity, num and den");
    const int arity = j["arity"].get<int>();
    if (arity < 0) throw parse_error("negative arity");
    Polynomial den = decode_polynomial(j["den"], arity);
    if (den.is_zero()) throw parse_error("zero denominator");
    std::vector<RatFunc> comps;
    for (const auto& n : j["num"]) comps.emplace_back(decode_polynomial(n, arity), den);
    return RationalMap(arity, std::move(comps));
}

/// Scalar rational function, used for tensor leaves.
inline Json encode(const RatFunc& f) {
    Json j;
    j["num"] = encode(f.num());
    j["den"] = encode(f.den());
    return j;
}

inline RatFunc decode_ratfunc(const Json& j, int arity) {
    if (j.is_string()) return RatFunc::constant(arity, decode_rational(j));
    if (!j.contains("num") || !j.contains("den")) throw parse_error("rational function needs num/den");
    return RatFunc(decode_polynomial(j["num"], arity), decode_polynomial(j["den"], arity));
}

// ---- index sets ------------------------------------------------------------

inline Json encode_mask(IndexMask m) { return mask_to_indices(m); }

inline IndexMask decode_mask(const Json& j, int bound) {
    if (!j.is_array()) throw parse_error("index subset must be an array");
    return indices_to_mask(j.get<std::vector<int>>(), bound);
}

inline std::vector<IndexMask> graded_sorted_masks(int upto_bits, bool include_empty) {
    std::vector<IndexMask> masks;
    for (IndexMask m = include_empty ? 0 : 1; m < (IndexMask(1) << upto_bits); ++m)
        masks.push_back(m);
    std::sort(masks.begin(), masks.end(), [](IndexMask a, IndexMask b) {
        return graded_lex_compare(mask_to_indices(a), mask_to_indices(b)) < 0;
    });
    return masks;
}

// ---- Grassmann -------------------------------------------------------------

inline Json encode(const GrassmannElement& e) {
    Json j;
    j["n"] = e.n();
    Json coeffs = Json::array();
    for (IndexMask m : graded_sorted_masks(e.n(), true)) {
        auto it = e.coeffs().find(m);
        if (it == e.coeffs().end()) continue;
        Json c;
        c["I"] = encode_mask(m);
        c["c"] = encode(it->second);
        coeffs.push_back(std::move(c));
    }
    j["coeffs"] = std::move(coeffs);
    return j;
}

inline GrassmannElement decode_grassmann(const Json& j, int cap = kDefaultGeneratorCap) {
    if (!j.contains("n") || !j.contains("coeffs")) throw parse_error("element needs n and coeffs");
    GrassmannElement e(j["n"].get<int>(), cap);
    for (const auto& c : j["coeffs"])
        e.add(decode_mask(c["I"], e.n()), decode_rational(c["c"]));
    return e;
}

inline Json encode(const GrassmannMorphism& m) {
    Json j;
    j["n_src"] = m.n_src();
    j["n_tgt"] = m.n_tgt();
    Json images = Json::array();
    for (const auto& img : m.images()) images.push_back(encode(img));
    j["images"] = std::move(images);
    return j;
}

inline GrassmannMorphism decode_grassmann_morphism(const Json& j,
                                                   int cap = kDefaultGeneratorCap) {
    std::vector<GrassmannElement> images;
    for (const auto& img : j["images"]) images.push_back(decode_grassmann(img, cap));
    return GrassmannMorphism(j["n_src"].get<int>(), j["n_tgt"].get<int>(), std::move(images));
}

// ---- boxes and spaces -------------------------------------------------------

inline Json encode(const DomainBox& b) {
    if (b.is_all()) return "all";
    Json j = Json::array();
    for (const auto& iv : b.intervals()) {
        Json i;
        i["lo"] = iv.lo ? Json(encode(*iv.lo)) : Json(nullptr);
        i["hi"] = iv.hi ? Json(encode(*iv.hi)) : Json(nullptr);
        i["lo_closed"] = iv.lo_closed;
        i["hi_closed"] = iv.hi_closed;
        j.push_back(std::move(i));
    }
    return j;
}

inline DomainBox decode_box(const Json& j) {
    if (j.is_string() && j.get<std::string>() == "all") return DomainBox();
    if (!j.is_array()) throw parse_error("box must be \"all\" or an interval array");
    std::vector<Interval> ivals;
    for (const auto& i : j) {
        Interval iv;
        if (i.contains("lo") && !i["lo"].is_null()) iv.lo = decode_rational(i["lo"]);
        if (i.contains("hi") && !i["hi"].is_null()) iv.hi = decode_rational(i["hi"]);
        if (i.contains("lo_closed")) iv.lo_closed = i["lo_closed"].get<bool>();
        if (i.contains("hi_closed")) iv.hi_closed = i["hi_closed"].get<bool>();
        ivals.push_back(iv);
    }
    return DomainBox(std::move(ivals));
}

inline Json encode(const SuperVectorSpace& s) {
    Json j;
    j["p"] = s.even_dim;
    j["q"] = s.odd_dim;
    return j;
}

inline SuperVectorSpace decode_space(const Json& j) {
    if (!j.contains("p") || !j.contains("q")) throw parse_error("space needs p and q");
    SuperVectorSpace s{j["p"].get<int>(), j["q"].get<int>()};
    if (s.even_dim < 0 || s.odd_dim < 0) throw parse_error("negative dimension");
    return s;
}

inline Json encode(const SuperPoint& v) {
    Json j;
    j["space"] = encode(v.space());
    j["n"] = v.level();
    Json comps = Json::array();
    for (IndexMask m : graded_sorted_masks(v.level(), true)) {
        auto it = v.comps().find(m);
        if (it == v.comps().end()) continue;
        Json c;
        c["I"] = encode_mask(m);
        Json vals = Json::array();
        for (const auto& x : it->second) vals.push_back(encode(x));
        c["v"] = std::move(vals);
        comps.push_back(std::move(c));
    }
    j["comps"] = std::move(comps);
    return j;
}

inline SuperPoint decode_point(const Json& j) {
    SuperPoint v(decode_space(j["space"]), j["n"].get<int>());
    for (const auto& c : j["comps"]) {
        RatVector vals;
        for (const auto& x : c["v"]) vals.push_back(decode_rational(x));
        v.add(decode_mask(c["I"], v.level()), vals);
    }
    return v;
}

// ---- skeletons ---------------------------------------------------------------

inline Json encode(const Skeleton& f) {
    Json j;
    Json src = encode(f.source);
    src["box"] = encode(f.box);
    j["source"] = std::move(src);
    j["target"] = encode(f.target);
    if (f.product) {
        Json pr;
        pr["h"] = encode(f.product->first);
        pr["e"] = encode(f.product->second);
        j["product"] = std::move(pr);
    }
    Json comps = Json::array();
    for (int k = 0; k < static_cast<int>(f.comps.size()); ++k) {
        const auto& comp = f.comps[static_cast<std::size_t>(k)];
        if (comp.is_zero()) continue;
        Json c;
        c["k"] = k;
        Json entries = Json::array();
        for (const auto& [tuple, map] : comp.entries()) {
            Json e;
            e["tuple"] = tuple;
            e["map"] = encode(map);
            entries.push_back(std::move(e));
        }
        c["entries"] = std::move(entries);
        comps.push_back(std::move(c));
    }
    j["comps"] = std::move(comps);
    return j;
}

inline Skeleton decode_skeleton(const Json& j) {
    SuperVectorSpace src = decode_space(j["source"]);
    SuperVectorSpace tgt = decode_space(j["target"]);
    DomainBox box;
    if (j["source"].contains("box")) box = decode_box(j["source"]["box"]);
    Skeleton f(src, tgt, std::move(box));
    if (j.contains("product")) {
        SuperVectorSpace h = decode_space(j["product"]["h"]);
        SuperVectorSpace e = decode_space(j["product"]["e"]);
        if (!(h + e == src)) throw parse_error("product factors do not add up");
        f.product = std::make_pair(h, e);
    }
    for (const auto& c : j["comps"]) {
        const int k = c["k"].get<int>();
        if (k < 0 || k > src.odd_dim) throw parse_error("component degree out of range");
        for (const auto& e : c["entries"]) {
            std::vector<int> tuple = e["tuple"].get<std::vector<int>>();
            RationalMap map = decode_rational_map(e["map"]);
            f.comp(k).set(std::move(tuple), std::move(map));
        }
    }
    return f;
}

// ---- cubes ---------------------------------------------------------------------

inline Json encode(const CubeSpace& s) {
    Json j;
    j["k"] = s.degree;
    Json dims = Json::array();
    for (IndexMask m : graded_sorted_masks(s.degree, false)) {
        Json d;
        d["I"] = encode_mask(m);
        d["d"] = s.dim(m);
        dims.push_back(std::move(d));
    }
    j["dims"] = std::move(dims);
    return j;
}

inline CubeSpace decode_cube_space(const Json& j) {
    CubeSpace s(j["k"].get<int>());
    for (const auto& d : j["dims"]) s.set_dim(decode_mask(d["I"], s.degree), d["d"].get<int>());
    return s;
}

namespace detail_json {

inline Json encode_tensor_level(const CubeTensor& t, std::vector<int>& idx, std::size_t depth,
                                int base_arity) {
    if (depth == t.arg_dims.size()) {
        Json out = Json::array();
        for (int o = 0; o < t.out_dim; ++o) {
            const RatFunc& e = t.at(idx, o);
            if (base_arity == 0)
                out.push_back(encode(e.constant_value()));
            else
                out.push_back(encode(e));
        }
        return out;
    }
    Json out = Json::array();
    for (int i = 0; i < t.arg_dims[depth]; ++i) {
        idx.push_back(i);
        out.push_back(encode_tensor_level(t, idx, depth + 1, base_arity));
        idx.pop_back();
    }
    return out;
}

inline void decode_tensor_level(const Json& j, CubeTensor& t, std::vector<int>& idx,
                                std::size_t depth, int base_arity) {
    if (depth == t.arg_dims.size()) {
        if (!j.is_array() || static_cast<int>(j.size()) != t.out_dim)
            throw parse_error("tensor leaf has the wrong output dimension");
        for (int o = 0; o < t.out_dim; ++o) t.at(idx, o) = decode_ratfunc(j[static_cast<std::size_t>(o)], base_arity);
        return;
    }
    if (!j.is_array() || static_cast<int>(j.size()) != t.arg_dims[depth])
        throw parse_error("tensor nesting does not match the axis dimensions");
    for (int i = 0; i < t.arg_dims[depth]; ++i) {
        idx.push_back(i);
        decode_tensor_level(j[static_cast<std::size_t>(i)], t, idx, depth + 1, base_arity);
        idx.pop_back();
    }
}

} // namespace detail_json

inline Json encode(const CubeMorphism& m) {
    Json j;
    j["source"] = encode(m.source);
    j["target"] = encode(m.target);
    j["base_arity"] = m.base_arity;
    Json family = Json::array();
    for (const auto& [key, tensor] : m.family) {
        Json f;
        Json nu = Json::array();
        for (IndexMask b : key) nu.push_back(encode_mask(b));
        f["nu"] = std::move(nu);
        std::vector<int> idx;
        f["tensor"] = detail_json::encode_tensor_level(tensor, idx, 0, m.base_arity);
        family.push_back(std::move(f));
    }
    j["family"] = std::move(family);
    return j;
}

inline CubeMorphism decode_cube_morphism(const Json& j) {
    CubeMorphism m(decode_cube_space(j["source"]), decode_cube_space(j["target"]),
                   j["base_arity"].get<int>());
    for (const auto& f : j["family"]) {
        PartitionKey key;
        for (const auto& b : f["nu"]) key.push_back(decode_mask(b, m.source.degree));
        std::vector<int> dims;
        IndexMask total = 0;
        for (IndexMask b : key) {
            dims.push_back(m.source.dim(b));
            total |= b;
        }
        CubeTensor t(dims, m.target.dim(total), m.base_arity);
        std::vector<int> idx;
        detail_json::decode_tensor_level(f["tensor"], t, idx, 0, m.base_arity);
        m.set(key, std::move(t));
    }
    return m;
}

// ---- atlases ---------------------------------------------------------------------

inline Json encode(const SuperAtlas& a) {
    Json j;
    j["model"] = encode(a.model);
    j["level"] = a.level ? Json(*a.level) : Json(nullptr);
    Json charts = Json::array();
    for (const auto& c : a.charts) {
        Json cj;
        cj["id"] = c.id;
        cj["box"] = encode(c.box);
        charts.push_back(std::move(cj));
    }
    j["charts"] = std::move(charts);
    Json overlaps = Json::array();
    for (const auto& [pair, box] : a.overlaps) {
        Json o;
        o["src"] = pair.first;
        o["dst"] = pair.second;
        o["box"] = encode(box);
        overlaps.push_back(std::move(o));
    }
    j["overlaps"] = std::move(overlaps);
    Json transitions = Json::array();
    for (const auto& [pair, f] : a.transitions) {
        Json t;
        t["src"] = pair.first;
        t["dst"] = pair.second;
        t["skeleton"] = encode(f);
        transitions.push_back(std::move(t));
    }
    j["transitions"] = std::move(transitions);
    return j;
}

inline SuperAtlas decode_atlas(const Json& j) {
    SuperAtlas a;
    a.model = decode_space(j["model"]);
    if (j.contains("level") && !j["level"].is_null()) a.level = j["level"].get<int>();
    for (const auto& c : j["charts"]) a.charts.push_back({c["id"].get<std::string>(),
                                                          decode_box(c["box"])});
    if (j.contains("overlaps"))
        for (const auto& o : j["overlaps"])
            a.overlaps.emplace(std::make_pair(o["src"].get<std::string>(),
                                              o["dst"].get<std::string>()),
                               decode_box(o["box"]));
    for (const auto& t : j["transitions"]) {
        Skeleton f = decode_skeleton(t["skeleton"]);
        if (!(f.source == a.model) || !(f.target == a.model))
            throw parse_error("transition model space mismatch");
        a.transitions.emplace(std::make_pair(t["src"].get<std::string>(),
                                             t["dst"].get<std::string>()),
                              std::move(f));
    }
    return a;
}

// ---- bundles ----------------------------------------------------------------------

inline Json encode(const LocalMultilinearBundle& b) {
    Json j;
    j["degree"] = b.degree;
    j["base_dim"] = b.base_dim;
    j["fiber"] = encode(b.fiber);
    Json charts = Json::array();
    for (const auto& id : b.charts) {
        Json c;
        c["id"] = id;
        c["box"] = encode(b.boxes.count(id) ? b.boxes.at(id) : DomainBox());
        charts.push_back(std::move(c));
    }
    j["charts"] = std::move(charts);
    Json overlaps = Json::array();
    for (const auto& [pair, box] : b.overlaps) {
        Json o;
        o["src"] = pair.first;
        o["dst"] = pair.second;
        o["box"] = encode(box);
        overlaps.push_back(std::move(o));
    }
    j["overlaps"] = std::move(overlaps);
    Json transitions = Json::array();
    for (const auto& [pair, tr] : b.transitions) {
        Json t;
        t["src"] = pair.first;
        t["dst"] = pair.second;
        t["base"] = encode(tr.base);
        t["fiber"] = encode(tr.fiber);
        transitions.push_back(std::move(t));
    }
    j["transitions"] = std::move(transitions);
    return j;
}

inline LocalMultilinearBundle decode_bundle(const Json& j) {
    LocalMultilinearBundle b;
    b.degree = j["degree"].get<int>();
    b.base_dim = j["base_dim"].get<int>();
    b.fiber = decode_cube_space(j["fiber"]);
    for (const auto& c : j["charts"]) {
        b.charts.push_back(c["id"].get<std::string>());
        b.boxes[c["id"].get<std::string>()] = decode_box(c["box"]);
    }
    if (j.contains("overlaps"))
        for (const auto& o : j["overlaps"])
            b.overlaps.emplace(std::make_pair(o["src"].get<std::string>(),
                                              o["dst"].get<std::string>()),
                               decode_box(o["box"]));
    for (const auto& t : j["transitions"]) {
        BundleTransition tr;
        tr.base = decode_rational_map(t["base"]);
        tr.fiber = decode_cube_morphism(t["fiber"]);
        b.transitions.emplace(std::make_pair(t["src"].get<std::string>(),
                                             t["dst"].get<std::string>()),
                              std::move(tr));
    }
    return b;
}

// ---- manifold and vector bundle input data ------------------------------------------

inline ManifoldData decode_manifold(const Json& j) {
    ManifoldData m;
    m.dim = j["dim"].get<int>();
    for (const auto& c : j["charts"]) m.charts.push_back({c["id"].get<std::string>(),
                                                          decode_box(c["box"])});
    if (j.contains("overlaps"))
        for (const auto& o : j["overlaps"])
            m.overlaps.emplace(std::make_pair(o["src"].get<std::string>(),
                                              o["dst"].get<std::string>()),
                               decode_box(o["box"]));
    for (const auto& t : j["transitions"])
        m.transitions.emplace(std::make_pair(t["src"].get<std::string>(),
                                             t["dst"].get<std::string>()),
                              decode_rational_map(t["map"]));
    return m;
}

inline VectorBundleData decode_vbundle(const Json& j) {
    VectorBundleData vb;
    vb.base_dim = j["base_dim"].get<int>();
    vb.fiber_dim = j["fiber_dim"].get<int>();
    for (const auto& c : j["charts"]) vb.charts.push_back({c["id"].get<std::string>(),
                                                           decode_box(c["box"])});
    if (j.contains("overlaps"))
        for (const auto& o : j["overlaps"])
            vb.overlaps.emplace(std::make_pair(o["src"].get<std::string>(),
                                               o["dst"].get<std::string>()),
                                decode_box(o["box"]));
    for (const auto& t : j["base_transitions"])
        vb.base_transitions.emplace(std::make_pair(t["src"].get<std::string>(),
                                                   t["dst"].get<std::string>()),
                                    decode_rational_map(t["map"]));
    for (const auto& t : j["fiber_transitions"]) {
        Matrix<RatFunc> mat;
        for (const auto& row : t["matrix"]) {
            std::vector<RatFunc> r;
            for (const auto& e : row) r.push_back(decode_ratfunc(e, vb.base_dim));
            mat.push_back(std::move(r));
        }
        vb.fiber_transitions.emplace(std::make_pair(t["src"].get<std::string>(),
                                                    t["dst"].get<std::string>()),
                                     std::move(mat));
    }
    return vb;
}

inline LocalSuperMorphism decode_morphism(const Json& j) {
    LocalSuperMorphism m;
    m.source = decode_atlas(j["source"]);
    m.target = decode_atlas(j["target"]);
    for (const auto& c : j["components"]) {
        auto key = std::make_pair(c["src"].get<std::string>(), c["dst"].get<std::string>());
        if (c.contains("box")) m.domains.emplace(key, decode_box(c["box"]));
        m.components.emplace(key, decode_skeleton(c["skeleton"]));
    }
    return m;
}

inline Json encode(const LocalSuperMorphism& m) {
    Json j;
    j["source"] = encode(m.source);
    j["target"] = encode(m.target);
    Json comps = Json::array();
    for (const auto& [pair, f] : m.components) {
        Json c;
        c["src"] = pair.first;
        c["dst"] = pair.second;
        auto it = m.domains.find(pair);
        if (it != m.domains.end()) c["box"] = encode(it->second);
        c["skeleton"] = encode(f);
        comps.push_back(std::move(c));
    }
    j["components"] = std::move(comps);
    return j;
}

// ---- limit elements -------------------------------------------------------------------

inline Json encode_cube_point(const CubePoint& v) {
    Json out = Json::array();
    for (const auto& [m, vec] : v) {
        Json c;
        c["I"] = encode_mask(m);
        Json vals = Json::array();
        for (const auto& x : vec) vals.push_back(encode(x));
        c["v"] = std::move(vals);
        out.push_back(std::move(c));
    }
    return out;
}

inline CubePoint decode_cube_point(const Json& j, int degree) {
    CubePoint v;
    for (const auto& c : j) {
        RatVector vals;
        for (const auto& x : c["v"]) vals.push_back(decode_rational(x));
        v[decode_mask(c["I"], degree)] = std::move(vals);
    }
    return v;
}

inline Json encode(const TruncatedLimitElement& e) {
    Json j;
    j["levels"] = e.levels;
    Json base = Json::array();
    for (const auto& x : e.base) base.push_back(encode(x));
    j["base"] = std::move(base);
    Json points = Json::array();
    for (const auto& p : e.points) points.push_back(encode_cube_point(p));
    j["points"] = std::move(points);
    return j;
}

inline TruncatedLimitElement decode_limit_element(const Json& j) {
    TruncatedLimitElement e;
    e.levels = j["levels"].get<int>();
    for (const auto& x : j["base"]) e.base.push_back(decode_rational(x));
    int k = 0;
    for (const auto& p : j["points"]) e.points.push_back(decode_cube_point(p, k++));
    return e;
}

// ---- reports ---------------------------------------------------------------------------

template <class Report>
Json encode_report(const Report& r) {
    Json j;
    j["status"] = r.pass ? "pass" : "fail";
    j["witness"] = r.witnesses;
    return j;
}

inline std::string dump_canonical(const Json& j) { return j.dump(2) + "\n"; }

} // namespace jio

} // namespace sgeom

#endif
