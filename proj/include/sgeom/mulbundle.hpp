#ifndef SGEOM_MULBUNDLE_HPP
#define SGEOM_MULBUNDLE_HPP

#include <map>
#include <string>
#include <vector>

#include "sgeom/box.hpp"
#include "sgeom/mulspace.hpp"

namespace sgeom {

/// Fiber transition over a base transition: entries are rational functions
/// of the source chart coordinates.
struct BundleTransition {
    RationalMap base;   // source chart coords -> target chart coords
    CubeMorphism fiber; // base-parametrized cube morphism

    bool operator==(const BundleTransition& o) const { return base == o.base && fiber == o.fiber; }
};

/// Composition over matching charts: (g after f)(x, v) with g's entries read
/// at f's image base point.
inline BundleTransition transition_compose(const BundleTransition& g, const BundleTransition& f) {
    BundleTransition out;
    out.base = g.base.after(f.base);
    out.fiber = cube_compose(g.fiber.precompose_base(f.base), f.fiber);
    return out;
}

/// Chart-local multilinear bundle: base boxes, one fiber cube, transitions
/// indexed by ordered chart pairs with their overlap boxes.
struct LocalMultilinearBundle {
    int degree = 0;
    int base_dim = 0;
    CubeSpace fiber;
    std::vector<std::string> charts;
    std::map<std::string, DomainBox> boxes;
    std::map<std::pair<std::string, std::string>, DomainBox> overlaps;
    std::map<std::pair<std::string, std::string>, BundleTransition> transitions;

    const BundleTransition* transition(const std::string& a, const std::string& b) const {
        auto it = transitions.find({a, b});
        return it == transitions.end() ? nullptr : &it->second;
    }
};

struct BundleReport {
    bool pass = true;
    std::vector<std::string> witnesses;

    void fail(std::string w) {
        pass = false;
        witnesses.push_back(std::move(w));
    }
};

/// Validates the cocycle identities and fiberwise invertibility at sampled
/// base points; failures are report content, not errors.
inline BundleReport validate_bundle(const LocalMultilinearBundle& b, int grid = 3) {
    BundleReport rep;
    for (const auto& [pair, tr] : b.transitions) {
        const auto& [a, c] = pair;
        auto ov = b.overlaps.find(pair);
        if (ov == b.overlaps.end()) {
            rep.fail("transition " + a + "->" + c + " without declared overlap");
            continue;
        }
        for (const auto& x : ov->second.sample_points(b.base_dim, grid)) {
            auto inst = tr.fiber.at_base(x);
            auto inv = cube_invert(inst);
            if (!inv.invertible) {
                rep.fail("fiber transition " + a + "->" + c + " not invertible at a sample point");
                break;
            }
        }
        // two-sided cocycle with the reverse transition
        const BundleTransition* back = b.transition(c, a);
        if (back) {
            auto round = transition_compose(*back, tr);
            if (!rmap_equal(round.base, RationalMap::identity(b.base_dim)))
                rep.fail("base transitions " + a + "->" + c + " do not invert");
            else if (!(round.fiber == CubeMorphism::identity(b.fiber, b.base_dim)))
                rep.fail("fiber transitions " + a + "->" + c + " do not invert");
        }
    }
    // triple identities on common overlaps
    for (const auto& a : b.charts)
        for (const auto& c : b.charts)
            for (const auto& d : b.charts) {
                if (a == c || c == d || a == d) continue;
                const BundleTransition* ac = b.transition(a, c);
                const BundleTransition* cd = b.transition(c, d);
                const BundleTransition* ad = b.transition(a, d);
                if (!ac || !cd || !ad) continue;
                auto composite = transition_compose(*cd, *ac);
                if (!rmap_equal(composite.base, ad->base) || !(composite.fiber == ad->fiber))
                    rep.fail("triple cocycle fails through " + a + "->" + c + "->" + d);
            }
    return rep;
}

/// Higher tangent of a rational map as the fiber transition of the trivial
/// degree-k bundle: the I-component is the sum over partitions of I of the
/// length-of-partition derivative evaluated on the blocks.
inline BundleTransition higher_tangent(const RationalMap& phi, int k) {
    const int p = phi.arity(), pp = phi.codim();
    BundleTransition out;
    out.base = phi;
    out.fiber = CubeMorphism(CubeSpace::uniform(k, p), CubeSpace::uniform(k, pp), p);
    for (IndexMask mask = 1; mask < (IndexMask(1) << k); ++mask) {
        for (const auto& nu : enumerate_partitions(mask_to_indices(mask))) {
            PartitionKey key = partition_key(nu, 32);
            const int l = nu.length();
            CubeTensor t(std::vector<int>(static_cast<std::size_t>(l), p), pp, p);
            // entry[j_1..j_l; o] = d^l phi_o / dx_{j_1}..dx_{j_l}
            std::vector<int> idx(static_cast<std::size_t>(l), 0);
            bool more = true;
            while (more) {
                RationalMap der = phi;
                for (int j : idx) der = der.partial(j);
                for (int o = 0; o < pp; ++o) t.at(idx, o) = der.comp(o);
                more = detail::next_args(idx, t.arg_dims);
            }
            if (!t.is_zero()) out.fiber.family.emplace(std::move(key), std::move(t));
        }
    }
    return out;
}

/// Tangent of a bundle transition: base doubles to (x, y), every axis
/// doubles, first components reproduce the entries and second components
/// collect the base derivative plus the one-slot replacements.
inline BundleTransition tangent_of_morphism(const BundleTransition& f) {
    const int p = f.base.arity(), pp = f.base.codim();
    const int p2 = 2 * p;
    std::vector<int> image(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) image[static_cast<std::size_t>(i)] = i;
    auto lift = [&](const RatFunc& c) { return c.remap(p2, image); };

    BundleTransition out;
    // base (phi(x), d phi(x) y)
    {
        std::vector<RatFunc> comps;
        for (int o = 0; o < pp; ++o) comps.push_back(lift(f.base.comp(o)));
        for (int o = 0; o < pp; ++o) {
            RatFunc acc(p2);
            for (int t = 0; t < p; ++t)
                acc += RatFunc::variable(p2, p + t) * lift(f.base.comp(o).partial(t));
            comps.push_back(acc);
        }
        out.base = RationalMap(p2, std::move(comps));
    }

    CubeSpace src2(f.fiber.source.degree), tgt2(f.fiber.target.degree);
    for (auto& [m, d] : src2.dims) d = 2 * f.fiber.source.dim(m);
    for (auto& [m, d] : tgt2.dims) d = 2 * f.fiber.target.dim(m);
    out.fiber = CubeMorphism(src2, tgt2, p2);

    for (const auto& [key, tensor] : f.fiber.family) {
        std::vector<int> dims2;
        for (int d : tensor.arg_dims) dims2.push_back(2 * d);
        const int od = tensor.out_dim;
        CubeTensor t(dims2, 2 * od, p2);
        std::vector<int> idx(dims2.size(), 0);
        bool more = !idx.empty();
        while (more) {
            // each argument slot is either a first- or second-copy basis
            // vector of the doubled axis
            int second_count = 0;
            std::size_t second_slot = 0;
            std::vector<int> local(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) {
                if (idx[i] < tensor.arg_dims[i]) {
                    local[i] = idx[i];
                } else {
                    ++second_count;
                    second_slot = i;
                    local[i] = idx[i] - tensor.arg_dims[i];
                }
            }
            if (second_count == 0) {
                for (int o = 0; o < od; ++o) {
                    const RatFunc& e = tensor.at(local, o);
                    if (e.is_zero()) continue;
                    // first components: the entry itself
                    t.at(idx, o) = lift(e);
                    // second components: base derivative in direction y
                    RatFunc acc(p2);
                    for (int v = 0; v < p; ++v)
                        acc += RatFunc::variable(p2, p + v) * lift(e.partial(v));
                    t.at(idx, od + o) = acc;
                }
            } else if (second_count == 1) {
                (void)second_slot;
                // one replaced slot feeds only the second components
                for (int o = 0; o < od; ++o) {
                    const RatFunc& e = tensor.at(local, o);
                    if (!e.is_zero()) t.at(idx, od + o) = lift(e);
                }
            }
            more = detail::next_args(idx, dims2);
        }
        if (!t.is_zero()) out.fiber.family.emplace(key, std::move(t));
    }
    return out;
}

/// Truncation of a total-space point to degree n.
inline CubePoint project_point(const CubePoint& v, int n) {
    CubePoint out;
    const IndexMask bound = IndexMask(1) << n;
    for (const auto& [m, vec] : v)
        if (m < bound) out[m] = vec;
    return out;
}

/// Truncation of transitions to the degree-n subbundle.
inline BundleTransition project_transition(const BundleTransition& f, int n) {
    BundleTransition out;
    out.base = f.base;
    out.fiber = cube_truncate(f.fiber, n);
    return out;
}

inline LocalMultilinearBundle project_bundle(const LocalMultilinearBundle& b, int n) {
    if (n > b.degree) throw dimension_error("cannot project upward");
    LocalMultilinearBundle out;
    out.degree = n;
    out.base_dim = b.base_dim;
    out.fiber = cube_truncate_space(b.fiber, n);
    out.charts = b.charts;
    out.boxes = b.boxes;
    out.overlaps = b.overlaps;
    for (const auto& [pair, tr] : b.transitions)
        out.transitions.emplace(pair, project_transition(tr, n));
    return out;
}

/// Element of a truncated inverse system: one total-space point per level.
struct TruncatedLimitElement {
    int levels = 0; // entries 0..levels
    RatVector base;
    std::vector<CubePoint> points; // points[k] lives in the degree-k fiber
};

/// Coherence: each level projects onto the one below.
inline bool limit_check(const TruncatedLimitElement& e) {
    if (static_cast<int>(e.points.size()) != e.levels + 1) return false;
    for (int k = 1; k <= e.levels; ++k)
        if (project_point(e.points[static_cast<std::size_t>(k)], k - 1) !=
            e.points[static_cast<std::size_t>(k - 1)])
            return false;
    return true;
}

/// Applies a family of levelwise transitions; checks the intertwining
/// condition with the projections and the coherence of the image.
inline TruncatedLimitElement limit_map(const std::vector<BundleTransition>& family,
                                       const TruncatedLimitElement& e) {
    if (static_cast<int>(family.size()) != e.levels + 1)
        throw dimension_error("one transition per level required");
    if (!limit_check(e)) throw domain_error("incoherent limit element");
    for (int k = 1; k <= e.levels; ++k) {
        const auto& fk = family[static_cast<std::size_t>(k)];
        const auto& fn = family[static_cast<std::size_t>(k - 1)];
        if (!rmap_equal(fk.base, fn.base) ||
            !(cube_truncate(fk.fiber, k - 1) == fn.fiber))
            throw domain_error("family does not intertwine the projections");
    }
    TruncatedLimitElement out;
    out.levels = e.levels;
    out.base = family[0].base.eval(e.base);
    for (int k = 0; k <= e.levels; ++k) {
        const auto& fk = family[static_cast<std::size_t>(k)];
        out.points.push_back(cube_apply(fk.fiber.at_base(e.base),
                                        e.points[static_cast<std::size_t>(k)]));
    }
    if (!limit_check(out)) throw domain_error("image failed coherence");
    return out;
}

/// Minus functor applied transition-wise to a purely even bundle.
inline LocalMultilinearBundle bundle_minus_even(const LocalMultilinearBundle& b) {
    if (!b.fiber.purely_even()) throw domain_error("bundle is not purely even");
    LocalMultilinearBundle out = b;
    for (auto& [pair, tr] : out.transitions) tr.fiber = minus_functor(tr.fiber);
    return out;
}

} // namespace sgeom

#endif
