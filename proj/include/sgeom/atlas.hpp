#ifndef SGEOM_ATLAS_HPP
#define SGEOM_ATLAS_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sgeom/mulbundle.hpp"
#include "sgeom/skeleton.hpp"

namespace sgeom {

struct AtlasChart {
    std::string id;
    DomainBox box;
};

/// Local data of a supermanifold: charts, overlap boxes and transition
/// skeletons. The identity transitions are implicit.
struct SuperAtlas {
    SuperVectorSpace model;
    std::optional<int> level; // truncation level, absent means untruncated
    std::vector<AtlasChart> charts;
    std::map<std::pair<std::string, std::string>, DomainBox> overlaps;
    std::map<std::pair<std::string, std::string>, Skeleton> transitions;

    const AtlasChart* chart(const std::string& id) const {
        for (const auto& c : charts)
            if (c.id == id) return &c;
        return nullptr;
    }

    const Skeleton* transition(const std::string& a, const std::string& b) const {
        auto it = transitions.find({a, b});
        return it == transitions.end() ? nullptr : &it->second;
    }

    const DomainBox* overlap(const std::string& a, const std::string& b) const {
        auto it = overlaps.find({a, b});
        return it == overlaps.end() ? nullptr : &it->second;
    }

    int max_degree() const { return level ? std::min(*level, model.odd_dim) : model.odd_dim; }

    /// All transitions have vanishing components of degree >= 2.
    bool is_batchelor() const {
        for (const auto& [pair, f] : transitions)
            if (!f.is_batchelor()) return false;
        return true;
    }
};

struct AtlasReport {
    bool pass = true;
    std::vector<std::string> witnesses;

    void fail(std::string w) {
        pass = false;
        witnesses.push_back(std::move(w));
    }
};

namespace detail {

inline bool skeletons_match(const Skeleton& a, const Skeleton& b, int up_to) {
    if (!(a.source == b.source) || !(a.target == b.target)) return false;
    if (!rmap_equal(a.base(), b.base())) return false;
    for (int k = 1; k <= up_to; ++k) {
        std::map<std::vector<int>, RationalMap> ea(a.comp(k).entries().begin(),
                                                   a.comp(k).entries().end());
        std::map<std::vector<int>, RationalMap> eb(b.comp(k).entries().begin(),
                                                   b.comp(k).entries().end());
        for (const auto& [tuple, map] : ea) {
            auto it = eb.find(tuple);
            if (it == eb.end()) {
                if (!map.is_zero()) return false;
            } else if (!rmap_equal(map, it->second)) {
                return false;
            }
        }
        for (const auto& [tuple, map] : eb)
            if (ea.find(tuple) == ea.end() && !map.is_zero()) return false;
    }
    return true;
}

} // namespace detail

/// Verifies the identity and two-cocycle conditions symbolically (skeleton
/// composition plus exact rational-function equality) and, in addition, by
/// exact evaluation at a rational sample grid. Failures are reported, with
/// the first violated identity as witness.
inline AtlasReport cocycle_check(const SuperAtlas& a, int grid = 2) {
    AtlasReport rep;
    const int deg = a.max_degree();
    for (const auto& [pair, f] : a.transitions) {
        const auto& [alpha, beta] = pair;
        if (!a.chart(alpha) || !a.chart(beta)) {
            rep.fail("transition between undeclared charts " + alpha + "," + beta);
            continue;
        }
        if (!(f.source == a.model) || !(f.target == a.model))
            rep.fail("transition " + alpha + "->" + beta + " has the wrong model space");
        if (alpha == beta && !detail::skeletons_match(f, identity_skeleton(a.model, f.box), deg))
            rep.fail("self transition of " + alpha + " is not the identity");
        if (!a.overlap(alpha, beta))
            rep.fail("transition " + alpha + "->" + beta + " without declared overlap");
    }
    // pair identities
    for (const auto& [pair, f] : a.transitions) {
        const auto& [alpha, beta] = pair;
        if (alpha == beta) continue;
        const Skeleton* back = a.transition(beta, alpha);
        if (!back) {
            rep.fail("missing reverse transition " + beta + "->" + alpha);
            continue;
        }
        try {
            Skeleton round = compose(*back, f);
            if (!detail::skeletons_match(round, identity_skeleton(a.model, f.box), deg))
                rep.fail("transitions " + alpha + "->" + beta + " do not invert");
        } catch (const error& e) {
            rep.fail("composing " + alpha + "->" + beta + " with its reverse: " + e.what());
        }
    }
    // triple identities
    for (const auto& ca : a.charts)
        for (const auto& cb : a.charts)
            for (const auto& cc : a.charts) {
                if (ca.id == cb.id || cb.id == cc.id || ca.id == cc.id) continue;
                const Skeleton* ab = a.transition(ca.id, cb.id);
                const Skeleton* bc = a.transition(cb.id, cc.id);
                const Skeleton* ac = a.transition(ca.id, cc.id);
                if (!ab || !bc || !ac) continue;
                try {
                    // the identity is asserted on the triple overlap
                    auto dom = ab->box.intersect(ac->box, a.model.even_dim);
                    if (!dom) continue;
                    Skeleton ab_here = *ab;
                    ab_here.box = *dom;
                    Skeleton through = compose(*bc, ab_here);
                    if (!detail::skeletons_match(through, *ac, deg))
                        rep.fail("triple cocycle fails through " + ca.id + "->" + cb.id + "->" +
                                 cc.id);
                } catch (const error& e) {
                    rep.fail("triple cocycle through " + ca.id + "->" + cb.id + "->" + cc.id +
                             ": " + e.what());
                }
            }
    // sampled evaluation of the pair identity on the overlap grid
    for (const auto& [pair, f] : a.transitions) {
        const auto& [alpha, beta] = pair;
        if (alpha == beta) continue;
        const Skeleton* back = a.transition(beta, alpha);
        const DomainBox* ov = a.overlap(alpha, beta);
        if (!back || !ov) continue;
        for (const auto& x : ov->sample_points(a.model.even_dim, grid)) {
            try {
                RatVector y = f.base().eval(x);
                RatVector back_x = back->base().eval(y);
                if (back_x != x) {
                    rep.fail("sampled base round trip fails on " + alpha + "->" + beta);
                    break;
                }
            } catch (const pole_error&) {
                rep.fail("pole inside declared overlap of " + alpha + "->" + beta);
                break;
            }
        }
    }
    return rep;
}

/// Morphism of supermanifolds in local data: chart-pair skeletons plus their
/// domains.
struct LocalSuperMorphism {
    SuperAtlas source, target;
    std::map<std::pair<std::string, std::string>, DomainBox> domains;
    std::map<std::pair<std::string, std::string>, Skeleton> components;
};

/// Compatibility: psi^{b b'} o f^{a b} o phi^{a' a} = f^{a' b'} wherever the
/// three factors are declared.
inline AtlasReport cocycle_check(const LocalSuperMorphism& m) {
    AtlasReport rep;
    for (const auto& [pair, f] : m.components) {
        const auto& [alpha, beta] = pair;
        for (const auto& [pair2, f2] : m.components) {
            const auto& [alpha2, beta2] = pair2;
            const Skeleton* phi = m.source.transition(alpha2, alpha);
            const Skeleton* psi = m.target.transition(beta, beta2);
            if (!phi && alpha2 != alpha) continue;
            if (!psi && beta != beta2) continue;
            try {
                // the identity is only asserted on the common refinement, so
                // the composition skips the sampled domain assumption
                Skeleton lhs = f;
                if (phi) lhs = compose(lhs, *phi, 0);
                if (psi) lhs = compose(*psi, lhs, 0);
                if (!detail::skeletons_match(lhs, f2, m.source.max_degree()))
                    rep.fail("compatibility fails for (" + alpha + "," + beta + ") against (" +
                             alpha2 + "," + beta2 + ")");
            } catch (const error& e) {
                rep.fail(std::string("compatibility composition failed: ") + e.what());
            }
        }
    }
    return rep;
}

/// The degree-n multilinear bundle of an atlas: fiber axes carry the model
/// parity dimensions and the transition entries are the signed derivatives
/// of the skeleton components, blocks in graded lexicographic order.
inline LocalMultilinearBundle extract_bundle(const SuperAtlas& a, int n) {
    LocalMultilinearBundle b;
    b.degree = n;
    b.base_dim = a.model.even_dim;
    CubeSpace fiber(n);
    for (auto& [m, d] : fiber.dims) d = a.model.parity_dim(mask_card(m));
    b.fiber = fiber;
    for (const auto& c : a.charts) {
        b.charts.push_back(c.id);
        b.boxes[c.id] = c.box;
    }
    b.overlaps = a.overlaps;

    const int p = a.model.even_dim;
    for (const auto& [pair, f] : a.transitions) {
        BundleTransition tr;
        tr.base = f.base();
        tr.fiber = CubeMorphism(fiber, fiber, p);
        for (IndexMask mask = 1; mask < (IndexMask(1) << n); ++mask) {
            const int out_dim = fiber.dim(mask);
            if (out_dim == 0) continue;
            for (const auto& omega : enumerate_partitions(mask_to_indices(mask))) {
                const int e = omega.even_count(), l = omega.odd_count();
                if (l > a.model.odd_dim || l >= static_cast<int>(f.comps.size())) continue;
                const AltComponent& comp = f.comps[static_cast<std::size_t>(l)];
                if (comp.is_zero()) continue;
                PartitionKey key = partition_key(omega, 32);
                std::vector<int> dims;
                bool dead = false;
                for (IndexMask bm : key) {
                    int d = fiber.dim(bm);
                    dims.push_back(d);
                    if (d == 0) dead = true;
                }
                if (dead) continue;
                const int sign = partition_sign(omega);
                CubeTensor t(dims, out_dim, p);
                // slots: even blocks are derivative directions, odd blocks
                // alternating arguments
                std::vector<int> idx(dims.size(), 0);
                bool more = !idx.empty();
                bool any = false;
                while (more) {
                    // assemble the tuple for the odd slots
                    std::vector<int> odd_tuple;
                    for (int j = e; j < e + l; ++j)
                        odd_tuple.push_back(idx[static_cast<std::size_t>(j)] + 1);
                    auto [s, ptr] = comp.lookup(odd_tuple);
                    if (ptr) {
                        RationalMap der = *ptr;
                        for (int j = 0; j < e; ++j) der = der.partial(idx[static_cast<std::size_t>(j)]);
                        if (!der.is_zero()) {
                            any = true;
                            for (int o = 0; o < out_dim; ++o)
                                t.at(idx, o) = Rational(sign * s) * der.comp(o);
                        }
                    }
                    more = detail::next_args(idx, dims);
                }
                if (any && !t.is_zero()) tr.fiber.family.emplace(std::move(key), std::move(t));
            }
        }
        b.transitions.emplace(pair, std::move(tr));
    }
    return b;
}

/// Restriction to levels <= n: skeleton components above n are dropped.
inline SuperAtlas truncate(const SuperAtlas& a, int n) {
    SuperAtlas out = a;
    out.level = a.level ? std::min(*a.level, n) : n;
    for (auto& [pair, f] : out.transitions) f = truncate_skeleton(f, n);
    return out;
}

/// Ordinary-manifold chart data.
struct ManifoldData {
    int dim = 0;
    std::vector<AtlasChart> charts;
    std::map<std::pair<std::string, std::string>, DomainBox> overlaps;
    std::map<std::pair<std::string, std::string>, RationalMap> transitions;
};

/// The purely even supermanifold of a manifold: skeletons (phi_0, 0, ...).
inline SuperAtlas embed_manifold(const ManifoldData& m) {
    SuperAtlas a;
    a.model = SuperVectorSpace{m.dim, 0};
    a.charts = m.charts;
    a.overlaps = m.overlaps;
    for (const auto& [pair, phi] : m.transitions) {
        if (phi.arity() != m.dim || phi.codim() != m.dim)
            throw dimension_error("chart transition has the wrong shape");
        const DomainBox* ov = nullptr;
        auto it = m.overlaps.find(pair);
        if (it != m.overlaps.end()) ov = &it->second;
        Skeleton f(a.model, a.model, ov ? *ov : DomainBox());
        f.set_base(phi);
        a.transitions.emplace(pair, std::move(f));
    }
    auto rep = cocycle_check(a);
    if (!rep.pass) throw domain_error("input manifold data violates the cocycle: " +
                                      (rep.witnesses.empty() ? "" : rep.witnesses.front()));
    return a;
}

/// Vector-bundle chart data: base transitions plus fiber matrices.
struct VectorBundleData {
    int base_dim = 0;
    int fiber_dim = 0;
    std::vector<AtlasChart> charts;
    std::map<std::pair<std::string, std::string>, DomainBox> overlaps;
    std::map<std::pair<std::string, std::string>, RationalMap> base_transitions;
    // fiber matrix as a map with fiber_dim * fiber_dim components, row-major,
    // functions of the base coordinates
    std::map<std::pair<std::string, std::string>, Matrix<RatFunc>> fiber_transitions;
};

/// The Batchelor-type supermanifold of a vector bundle:
/// skeletons (phi_0, phi_1, 0, ...).
inline SuperAtlas embed_vbundle(const VectorBundleData& vb) {
    SuperAtlas a;
    a.model = SuperVectorSpace{vb.base_dim, vb.fiber_dim};
    a.charts = vb.charts;
    a.overlaps = vb.overlaps;
    for (const auto& [pair, phi0] : vb.base_transitions) {
        auto fit = vb.fiber_transitions.find(pair);
        if (fit == vb.fiber_transitions.end())
            throw dimension_error("missing fiber transition for a chart pair");
        const Matrix<RatFunc>& mat = fit->second;
        if (static_cast<int>(mat.size()) != vb.fiber_dim)
            throw dimension_error("fiber matrix has the wrong shape");
        const DomainBox* ov = nullptr;
        auto it = vb.overlaps.find(pair);
        if (it != vb.overlaps.end()) ov = &it->second;
        Skeleton f(a.model, a.model, ov ? *ov : DomainBox());
        f.set_base(phi0);
        for (int s = 1; s <= vb.fiber_dim; ++s) {
            std::vector<RatFunc> col;
            for (int t = 0; t < vb.fiber_dim; ++t) {
                const RatFunc& entry = mat[static_cast<std::size_t>(t)][static_cast<std::size_t>(s - 1)];
                if (entry.nvars() != vb.base_dim)
                    throw dimension_error("fiber entry arity mismatch");
                col.push_back(entry);
            }
            RationalMap colmap(vb.base_dim, std::move(col));
            if (!colmap.is_zero()) f.comp(1).set({s}, std::move(colmap));
        }
        a.transitions.emplace(pair, std::move(f));
    }
    auto rep = cocycle_check(a);
    if (!rep.pass) throw domain_error("vector bundle data violates the cocycle: " +
                                      (rep.witnesses.empty() ? "" : rep.witnesses.front()));
    return a;
}

/// Tangent atlas: charts double, transitions become (phi, d phi).
inline SuperAtlas tangent_atlas(const SuperAtlas& a) {
    SuperAtlas t;
    t.model = a.model + a.model;
    t.level = a.level;
    const int p = a.model.even_dim;
    for (const auto& c : a.charts) t.charts.push_back({c.id, c.box.concat(DomainBox(), p, p)});
    for (const auto& [pair, box] : a.overlaps)
        t.overlaps.emplace(pair, box.concat(DomainBox(), p, p));
    for (const auto& [pair, f] : a.transitions)
        t.transitions.emplace(pair, pair_skeleton(f, differential(f)));
    return t;
}

/// Check linearity of the fiber half of a bundle transition (h, psi), where
/// the declared product splits source = H + F and the target splits the same
/// way; the base half may be arbitrary.
inline bool is_ufamily_fiber_part(const Skeleton& f) {
    if (!f.product) throw domain_error("no declared product");
    const auto [h, e] = *f.product;
    // build the fiber-half skeleton by dropping the H-target components
    SuperVectorSpace tgt_h = h, tgt_f{f.target.even_dim - h.even_dim,
                                      f.target.odd_dim - h.odd_dim};
    if (tgt_f.even_dim < 0 || tgt_f.odd_dim < 0) throw dimension_error("target does not split");
    Skeleton fiber(f.source, tgt_f, f.box);
    fiber.product = f.product;
    for (int k = 0; k < static_cast<int>(f.comps.size()); ++k) {
        const int off = tgt_h.parity_dim(k);
        for (const auto& [tuple, map] : f.comps[static_cast<std::size_t>(k)].entries()) {
            std::vector<RatFunc> comps;
            for (int o = off; o < map.codim(); ++o) comps.push_back(map.comp(o));
            RationalMap entry(map.arity(), std::move(comps));
            if (!entry.is_zero()) fiber.comp(k).set(tuple, std::move(entry));
        }
    }
    return is_ufamily(fiber);
}

/// Super-vector-bundle shape: every transition is a pair (base part,
/// fiberwise-linear part) over a declared product model.
inline AtlasReport svbundle_validate(const SuperAtlas& a) {
    AtlasReport rep = cocycle_check(a);
    for (const auto& [pair, f] : a.transitions) {
        if (!f.product) {
            rep.fail("transition " + pair.first + "->" + pair.second +
                     " has no declared product structure");
            continue;
        }
        try {
            if (!is_ufamily_fiber_part(f))
                rep.fail("fiber part of " + pair.first + "->" + pair.second +
                         " is not fiberwise linear");
        } catch (const error& e) {
            rep.fail(std::string("fiber linearity check failed: ") + e.what());
        }
    }
    return rep;
}

/// Constant point family x_Lambda determined by a real point in a chart.
inline SuperPoint point_family(const SuperAtlas& a, const std::string& chart_id,
                               const RatVector& x_real, int level) {
    const AtlasChart* c = a.chart(chart_id);
    if (!c) throw domain_error("unknown chart");
    if (!c->box.contains(x_real)) throw domain_error("point outside the chart box");
    return SuperPoint::real(a.model, level, x_real);
}

/// Product atlas with pairwise charts and block transitions.
inline SuperAtlas product_atlas(const SuperAtlas& a, const SuperAtlas& b) {
    SuperAtlas out;
    out.model = a.model + b.model;
    if (a.level && b.level)
        out.level = std::min(*a.level, *b.level);
    else if (a.level || b.level)
        out.level = a.level ? *a.level : *b.level;
    for (const auto& ca : a.charts)
        for (const auto& cb : b.charts)
            out.charts.push_back({ca.id + "*" + cb.id,
                                  ca.box.concat(cb.box, a.model.even_dim, b.model.even_dim)});
    for (const auto& ca : a.charts)
        for (const auto& cb : b.charts)
            for (const auto& da : a.charts)
                for (const auto& db : b.charts) {
                    bool a_same = ca.id == da.id, b_same = cb.id == db.id;
                    if (a_same && b_same) continue;
                    const Skeleton* ta = a.transition(ca.id, da.id);
                    const Skeleton* tb = b.transition(cb.id, db.id);
                    if ((!a_same && !ta) || (!b_same && !tb)) continue;
                    Skeleton fa = ta ? *ta : identity_skeleton(a.model, ca.box);
                    Skeleton fb = tb ? *tb : identity_skeleton(b.model, cb.box);
                    const DomainBox* ova = a.overlap(ca.id, da.id);
                    const DomainBox* ovb = b.overlap(cb.id, db.id);
                    DomainBox ov = (ova ? *ova : ca.box)
                                       .concat(ovb ? *ovb : cb.box, a.model.even_dim,
                                               b.model.even_dim);
                    Skeleton prod = product_skeleton(fa, fb);
                    prod.box = ov;
                    out.overlaps.emplace(std::make_pair(ca.id + "*" + cb.id, da.id + "*" + db.id),
                                         ov);
                    out.transitions.emplace(
                        std::make_pair(ca.id + "*" + cb.id, da.id + "*" + db.id), std::move(prod));
                }
    return out;
}

struct EvenModelReport {
    bool pass = true;
    std::vector<std::string> witnesses;
};

/// Purely even model: the degree-n bundle of the embedded manifold equals
/// the minus-twisted even restriction of the order-k tangent data,
/// componentwise on every transition entry.
inline EvenModelReport even_model_iso(const ManifoldData& m, int k, int n) {
    if (n > k) throw dimension_error("need n <= k");
    EvenModelReport rep;
    SuperAtlas a = embed_manifold(m);
    LocalMultilinearBundle lhs = extract_bundle(a, n);

    std::set<IndexMask> evens;
    for (IndexMask mask = 1; mask < (IndexMask(1) << n); ++mask)
        if (mask_even(mask)) evens.insert(mask);

    for (const auto& [pair, phi] : m.transitions) {
        auto tk = higher_tangent(phi, k);
        auto truncated = cube_truncate(tk.fiber, n);
        auto restricted = cube_restrict(truncated, evens);
        auto minus = minus_functor(restricted);
        const BundleTransition* got = lhs.transition(pair.first, pair.second);
        if (!got) {
            rep.pass = false;
            rep.witnesses.push_back("missing extracted transition " + pair.first + "->" +
                                    pair.second);
            continue;
        }
        // componentwise identity of rational entries on the common support
        for (const auto& [key, tensor] : minus.family) {
            const CubeTensor* other = got->fiber.find(key);
            if (!other) {
                if (!tensor.is_zero()) {
                    rep.pass = false;
                    rep.witnesses.push_back("entry missing in the extracted bundle");
                }
                continue;
            }
            if (!(tensor == *other)) {
                rep.pass = false;
                rep.witnesses.push_back("entry mismatch on " + pair.first + "->" + pair.second);
            }
        }
        for (const auto& [key, tensor] : got->fiber.family)
            if (!minus.find(key) && !tensor.is_zero()) {
                rep.pass = false;
                rep.witnesses.push_back("extra entry in the extracted bundle");
            }
    }
    return rep;
}

} // namespace sgeom

#endif
