#ifndef SGEOM_SKELETON_HPP
#define SGEOM_SKELETON_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "sgeom/partitions.hpp"
#include "sgeom/superlin.hpp"

namespace sgeom {

/// Above this argument count the composition sum switches from the literal
/// permutation sum to the orbit-collapsed assignment sum.
inline constexpr int kLiteralPermutationLimit = 8;

/// Skeleton of a supersmooth morphism: alternating components f_0..f_q with
/// rational-function coefficient maps, f_k mapping into the target part of
/// parity k.
struct Skeleton {
    SuperVectorSpace source, target;
    DomainBox box; // over the source even coordinates
    // declared product structure H + E of the source, for fiberwise-linear
    // family operations
    std::optional<std::pair<SuperVectorSpace, SuperVectorSpace>> product;
    std::vector<AltComponent> comps; // index = degree, size source.odd_dim + 1

    Skeleton() = default;

    Skeleton(SuperVectorSpace src, SuperVectorSpace tgt, DomainBox domain = DomainBox())
        : source(src), target(tgt), box(std::move(domain)) {
        comps.reserve(static_cast<std::size_t>(src.odd_dim) + 1);
        for (int k = 0; k <= src.odd_dim; ++k)
            comps.emplace_back(k, src.odd_dim, src.even_dim, tgt.parity_dim(k));
    }

    const AltComponent& comp(int k) const { return comps[static_cast<std::size_t>(k)]; }
    AltComponent& comp(int k) { return comps[static_cast<std::size_t>(k)]; }

    void set_base(RationalMap f0) {
        if (f0.arity() != source.even_dim || f0.codim() != target.even_dim)
            throw dimension_error("base component has the wrong shape");
        comp(0).set({}, std::move(f0));
    }

    RationalMap base() const {
        auto [sign, ptr] = comp(0).lookup({});
        if (!ptr) return RationalMap(source.even_dim, target.even_dim);
        return *ptr;
    }

    bool equal_data(const Skeleton& o) const {
        return source == o.source && target == o.target && box == o.box && comps == o.comps;
    }

    /// Vanishing components of degree >= 2, i.e. induced by a vector bundle.
    bool is_batchelor() const {
        for (std::size_t k = 2; k < comps.size(); ++k)
            if (!comps[k].is_zero()) return false;
        return true;
    }
};

inline Skeleton identity_skeleton(SuperVectorSpace space, DomainBox box = DomainBox()) {
    Skeleton s(space, space, std::move(box));
    s.set_base(RationalMap::identity(space.even_dim));
    if (space.odd_dim > 0) {
        for (int j = 1; j <= space.odd_dim; ++j) {
            RatVector col = zero_vector(space.odd_dim);
            col[static_cast<std::size_t>(j - 1)] = Rational(1);
            s.comp(1).set({j}, RationalMap::constant(space.even_dim, col));
        }
    }
    return s;
}

inline Skeleton truncate_skeleton(Skeleton f, int n) {
    for (std::size_t k = static_cast<std::size_t>(n) + 1; k < f.comps.size(); ++k)
        f.comps[k] = AltComponent(static_cast<int>(k), f.source.odd_dim, f.source.even_dim,
                                  f.target.parity_dim(static_cast<int>(k)));
    return f;
}

inline Skeleton with_product(Skeleton f, SuperVectorSpace h, SuperVectorSpace e) {
    if (!(h + e == f.source)) throw dimension_error("product factors do not add up to the source");
    f.product = std::make_pair(h, e);
    return f;
}

namespace detail {

inline Rational factorial(int n) {
    Rational r(1);
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

/// d^m applied to every entry of an alternating component along rational
/// directions, evaluated at a rational base point, then alternated over the
/// odd arguments.
inline RatVector eval_dm_alt(const AltComponent& c, const RatVector& x,
                             const std::vector<RatVector>& even_dirs,
                             const std::vector<RatVector>& odd_args) {
    RatVector out = zero_vector(c.out_dim());
    if (static_cast<int>(odd_args.size()) != c.degree())
        throw dimension_error("wrong number of odd arguments");
    for (const auto& [tuple, map] : c.entries()) {
        RationalMap d = map;
        for (const auto& dir : even_dirs) d = d.directional(dir);
        RatVector vals = d.eval(x);
        Rational det(1);
        if (c.degree() > 0) {
            Matrix<Rational> minor(static_cast<std::size_t>(c.degree()),
                                   RatVector(static_cast<std::size_t>(c.degree()), Rational(0)));
            for (int r = 0; r < c.degree(); ++r)
                for (int col = 0; col < c.degree(); ++col)
                    minor[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] =
                        odd_args[static_cast<std::size_t>(r)]
                                [static_cast<std::size_t>(tuple[static_cast<std::size_t>(col)] - 1)];
            det = determinant(minor);
        }
        if (sgn(det) == 0) continue;
        for (std::size_t o = 0; o < out.size(); ++o) out[o] += det * vals[o];
    }
    return out;
}

/// Lazily differentiated outer components, optionally precomposed with a
/// base map: multi |-> d^multi g_l (then composed).
class OuterDerivatives {
public:
    OuterDerivatives(const std::vector<AltComponent>* comps, std::optional<RationalMap> base)
        : comps_(comps), base_(std::move(base)) {}

    const AltComponent* component(int l, const std::vector<int>& sorted_multi) {
        if (l < 0 || l >= static_cast<int>(comps_->size())) return nullptr;
        auto key = std::make_pair(l, sorted_multi);
        auto it = cache_.find(key);
        if (it != cache_.end()) return &it->second;
        const AltComponent& src = (*comps_)[static_cast<std::size_t>(l)];
        int arity = base_ ? base_->arity() : src.base_arity();
        AltComponent derived(src.degree(), src.odd_dim(), arity, src.out_dim());
        for (const auto& [tuple, map] : src.entries()) {
            RationalMap d = map;
            for (int v : sorted_multi) d = d.partial(v);
            if (base_) d = d.after(*base_);
            if (!d.is_zero()) derived.set(tuple, std::move(d));
        }
        auto [pos, ok] = cache_.emplace(std::move(key), std::move(derived));
        return &pos->second;
    }

private:
    const std::vector<AltComponent>* comps_;
    std::optional<RationalMap> base_;
    std::map<std::pair<int, std::vector<int>>, AltComponent> cache_;
};

inline int sequence_sign(const std::vector<int>& seq) {
    int inv = 0;
    for (std::size_t i = 0; i < seq.size(); ++i)
        for (std::size_t j = i + 1; j < seq.size(); ++j)
            if (seq[i] > seq[j]) ++inv;
    return inv % 2 == 0 ? 1 : -1;
}

/// Ordered tuples of even parts >= 2 (resp. odd parts >= 1) with a given sum
/// and bounded entries.
inline void enumerate_compositions(int sum, int parts, int parity, int max_part,
                                   std::vector<int>& cur,
                                   std::vector<std::vector<int>>& out) {
    if (parts == 0) {
        if (sum == 0) out.push_back(cur);
        return;
    }
    int start = parity == 0 ? 2 : 1;
    for (int v = start; v <= std::min(sum, max_part); v += 2) {
        cur.push_back(v);
        enumerate_compositions(sum - v, parts - 1, parity, max_part, cur, out);
        cur.pop_back();
    }
}

/// All ways to split positions 0..n-1 into ordered blocks of the given
/// sizes, blocks listed increasing; used by the orbit-collapsed sum.
template <class Fn>
void enumerate_assignments(std::vector<int>& remaining, const std::vector<int>& sizes,
                           std::size_t which, std::vector<std::vector<int>>& blocks, Fn&& fn) {
    if (which == sizes.size()) {
        std::vector<int> concat;
        for (const auto& b : blocks) concat.insert(concat.end(), b.begin(), b.end());
        fn(blocks, sequence_sign(concat));
        return;
    }
    const int k = sizes[which];
    // iterate over k-combinations of `remaining`
    std::vector<int> comb(static_cast<std::size_t>(k));
    std::vector<std::size_t> idx(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    while (true) {
        std::vector<int> rest;
        for (std::size_t i = 0, j = 0; i < remaining.size(); ++i) {
            if (j < idx.size() && idx[j] == i) {
                comb[j] = remaining[i];
                ++j;
            } else {
                rest.push_back(remaining[i]);
            }
        }
        blocks.push_back(comb);
        enumerate_assignments(rest, sizes, which + 1, blocks, fn);
        blocks.pop_back();
        // next combination
        std::size_t i = idx.size();
        while (i-- > 0) {
            if (idx[i] + (idx.size() - i) < remaining.size()) {
                ++idx[i];
                for (std::size_t j = i + 1; j < idx.size(); ++j) idx[j] = idx[j - 1] + 1;
                break;
            }
            if (i == 0) return;
        }
        if (idx.empty()) return;
    }
}

struct SumOptions {
    bool exclude_high_orders = false; // skip terms with m >= n or l >= n
    bool force_literal = false;
    bool force_collapsed = false;
};

/// The composition-type sum over (m, l), (alpha, beta) and permutations:
/// sum sgn(sigma)/(m! l! alpha! beta!) d^m G_l(...)((F_alpha x F_beta)(cols^sigma)).
/// `cols` are odd-argument columns over the scalars of F's entries.
inline std::vector<RatFunc> skeleton_sum(OuterDerivatives& outer,
                                         const std::vector<AltComponent>& f_comps,
                                         const std::vector<std::vector<RatFunc>>& cols,
                                         int out_dim, int arity, int outer_even_dim,
                                         const SumOptions& opt) {
    const int n = static_cast<int>(cols.size());
    const int max_f = static_cast<int>(f_comps.size()) - 1;
    std::vector<RatFunc> acc(static_cast<std::size_t>(out_dim), RatFunc(arity));
    const RatFunc zero(arity);

    bool literal = n <= kLiteralPermutationLimit;
    if (opt.force_literal) literal = true;
    if (opt.force_collapsed) literal = false;

    auto eval_f_block = [&](int comp_index, const std::vector<int>& positions) {
        std::vector<std::vector<RatFunc>> args;
        args.reserve(positions.size());
        for (int p : positions) args.push_back(cols[static_cast<std::size_t>(p)]);
        return f_comps[static_cast<std::size_t>(comp_index)].eval_columns<RatFunc>(
            args, zero, [](const RationalMap& m) { return m.comps(); });
    };

    for (int m = 0; 2 * m <= n; ++m) {
        for (int l = 0; l <= n - 2 * m; ++l) {
            if (opt.exclude_high_orders && (m >= n || l >= n)) continue;
            std::vector<std::vector<int>> alphas, betas;
            std::vector<int> cur;
            for (int s = 2 * m; s <= n - l; s += 2) {
                std::vector<std::vector<int>> a_part;
                enumerate_compositions(s, m, 0, max_f, cur, a_part);
                std::vector<std::vector<int>> b_part;
                enumerate_compositions(n - s, l, 1, max_f, cur, b_part);
                for (const auto& a : a_part)
                    for (const auto& b : b_part) {
                        alphas.push_back(a);
                        betas.push_back(b);
                    }
            }
            for (std::size_t abi = 0; abi < alphas.size(); ++abi) {
                const auto& alpha = alphas[abi];
                const auto& beta = betas[abi];
                std::vector<int> sizes;
                sizes.insert(sizes.end(), alpha.begin(), alpha.end());
                sizes.insert(sizes.end(), beta.begin(), beta.end());

                Rational coef = Rational(1) / (factorial(m) * factorial(l));
                if (literal) {
                    Rational fact_ab(1);
                    for (int a : alpha) fact_ab *= factorial(a);
                    for (int b : beta) fact_ab *= factorial(b);
                    coef /= fact_ab;
                }

                auto process = [&](const std::vector<std::vector<int>>& blocks, int sign) {
                    // f-values feeding the outer derivative slots
                    std::vector<std::vector<RatFunc>> w(static_cast<std::size_t>(m)),
                        u(static_cast<std::size_t>(l));
                    for (int i = 0; i < m; ++i) {
                        w[static_cast<std::size_t>(i)] =
                            eval_f_block(alpha[static_cast<std::size_t>(i)],
                                         blocks[static_cast<std::size_t>(i)]);
                        bool all_zero = true;
                        for (const auto& c : w[static_cast<std::size_t>(i)])
                            if (!c.is_zero()) all_zero = false;
                        if (all_zero) return;
                    }
                    bool u_zero = false;
                    for (int j = 0; j < l; ++j) {
                        u[static_cast<std::size_t>(j)] =
                            eval_f_block(beta[static_cast<std::size_t>(j)],
                                         blocks[static_cast<std::size_t>(m + j)]);
                        bool all_zero = true;
                        for (const auto& c : u[static_cast<std::size_t>(j)])
                            if (!c.is_zero()) all_zero = false;
                        if (all_zero) u_zero = true;
                    }
                    if (u_zero) return;

                    // sum over ordered derivative multi-indices
                    std::vector<int> multi(static_cast<std::size_t>(m), 0);
                    std::map<std::vector<int>, std::vector<RatFunc>> inner_cache;
                    bool more = true;
                    if (m > 0 && outer_even_dim == 0) return;
                    while (more) {
                        RatFunc prod_w = RatFunc::constant(arity, Rational(1));
                        bool dead = false;
                        for (int t = 0; t < m && !dead; ++t) {
                            const RatFunc& wc = w[static_cast<std::size_t>(t)]
                                                 [static_cast<std::size_t>(multi[static_cast<std::size_t>(t)])];
                            if (wc.is_zero())
                                dead = true;
                            else
                                prod_w *= wc;
                        }
                        if (!dead) {
                            std::vector<int> key(multi);
                            std::sort(key.begin(), key.end());
                            auto itc = inner_cache.find(key);
                            if (itc == inner_cache.end()) {
                                const AltComponent* der = outer.component(l, key);
                                std::vector<RatFunc> vals(static_cast<std::size_t>(out_dim), zero);
                                if (der && !der->is_zero())
                                    vals = der->eval_columns<RatFunc>(
                                        u, zero, [](const RationalMap& mp) { return mp.comps(); });
                                itc = inner_cache.emplace(std::move(key), std::move(vals)).first;
                            }
                            const auto& inner = itc->second;
                            bool inner_zero = true;
                            for (const auto& c : inner)
                                if (!c.is_zero()) inner_zero = false;
                            if (!inner_zero) {
                                Rational c = coef * Rational(sign);
                                for (int o = 0; o < out_dim; ++o) {
                                    const auto& iv = inner[static_cast<std::size_t>(o)];
                                    if (iv.is_zero()) continue;
                                    acc[static_cast<std::size_t>(o)] += c * (prod_w * iv);
                                }
                            }
                        }
                        more = m > 0 && next_multi_index(multi, outer_even_dim);
                    }
                };

                if (literal) {
                    std::vector<int> perm(static_cast<std::size_t>(n));
                    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
                    do {
                        std::vector<std::vector<int>> blocks;
                        std::size_t at = 0;
                        for (int s : sizes) {
                            blocks.emplace_back(perm.begin() + static_cast<long>(at),
                                                perm.begin() + static_cast<long>(at + static_cast<std::size_t>(s)));
                            at += static_cast<std::size_t>(s);
                        }
                        process(blocks, sequence_sign(perm));
                    } while (std::next_permutation(perm.begin(), perm.end()));
                } else {
                    std::vector<int> all(static_cast<std::size_t>(n));
                    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
                    std::vector<std::vector<int>> blocks;
                    if (!sizes.empty())
                        enumerate_assignments(all, sizes, 0, blocks, process);
                    else if (n == 0)
                        process({}, 1);
                }
            }
        }
    }
    return acc;
}

inline std::vector<std::vector<RatFunc>> basis_columns(const std::vector<int>& tuple, int dim,
                                                       int arity) {
    std::vector<std::vector<RatFunc>> cols;
    for (int j : tuple) {
        std::vector<RatFunc> col(static_cast<std::size_t>(dim), RatFunc(arity));
        col[static_cast<std::size_t>(j - 1)] = RatFunc::constant(arity, Rational(1));
        cols.push_back(std::move(col));
    }
    return cols;
}

inline void enumerate_increasing_tuples(int k, int dim, std::vector<int>& cur,
                                        std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == k) {
        out.push_back(cur);
        return;
    }
    int start = cur.empty() ? 1 : cur.back() + 1;
    for (int j = start; j <= dim; ++j) {
        cur.push_back(j);
        enumerate_increasing_tuples(k, dim, cur, out);
        cur.pop_back();
    }
}

} // namespace detail

/// Evaluation by the factorial-free partition sum, blocks in graded
/// lexicographic order.
inline SuperPoint eval_partition(const Skeleton& f, const SuperPoint& v) {
    if (!(v.space() == f.source)) throw dimension_error("point space does not match skeleton source");
    const int n = v.level();
    auto dec = decompose_point(v);
    if (!f.box.contains(dec.base)) throw domain_error("base point outside the declared domain");
    SuperPoint out(f.target, n);
    out.set(0, f.base().eval(dec.base));

    // support masks present in the argument
    std::vector<IndexMask> even_masks, odd_masks;
    for (const auto& [m, vec] : dec.even_nilpotent.comps()) even_masks.push_back(m);
    for (const auto& [m, vec] : dec.odd_part.comps()) odd_masks.push_back(m);

    for (IndexMask target_mask = 1; target_mask < (IndexMask(1) << n); ++target_mask) {
        RatVector comp_val = zero_vector(f.target.parity_dim(mask_card(target_mask)));
        bool touched = false;
        for (const auto& omega : enumerate_partitions(mask_to_indices(target_mask))) {
            std::vector<RatVector> dirs, odd_args;
            bool dead = false;
            int l = omega.odd_count();
            if (l >= static_cast<int>(f.comps.size())) continue;
            for (const auto& block : omega.blocks()) {
                IndexMask bm = indices_to_mask(block, n);
                if (block.size() % 2 == 0) {
                    auto it = dec.even_nilpotent.comps().find(bm);
                    if (it == dec.even_nilpotent.comps().end()) {
                        dead = true;
                        break;
                    }
                    dirs.push_back(it->second);
                } else {
                    auto it = dec.odd_part.comps().find(bm);
                    if (it == dec.odd_part.comps().end()) {
                        dead = true;
                        break;
                    }
                    odd_args.push_back(it->second);
                }
            }
            if (dead) continue;
            RatVector val = detail::eval_dm_alt(f.comps[static_cast<std::size_t>(l)], dec.base,
                                                dirs, odd_args);
            if (vector_is_zero(val)) continue;
            Rational s(partition_sign(omega));
            for (std::size_t i = 0; i < comp_val.size(); ++i) comp_val[i] += s * val[i];
            touched = true;
        }
        if (touched) out.add(target_mask, comp_val);
    }
    return out;
}

/// Evaluation by the factorial double sum over (m, l) with multilinear
/// expansion; must agree with eval_partition on all inputs.
inline SuperPoint eval_taylor(const Skeleton& f, const SuperPoint& v) {
    if (!(v.space() == f.source)) throw dimension_error("point space does not match skeleton source");
    const int n = v.level();
    auto dec = decompose_point(v);
    if (!f.box.contains(dec.base)) throw domain_error("base point outside the declared domain");
    SuperPoint out(f.target, n);
    out.set(0, f.base().eval(dec.base));

    std::vector<std::pair<IndexMask, RatVector>> evens(dec.even_nilpotent.comps().begin(),
                                                       dec.even_nilpotent.comps().end());
    std::vector<std::pair<IndexMask, RatVector>> odds(dec.odd_part.comps().begin(),
                                                      dec.odd_part.comps().end());

    // ordered tuples of pairwise disjoint supports, with early pruning
    struct Walker {
        const std::vector<std::pair<IndexMask, RatVector>>& evens;
        const std::vector<std::pair<IndexMask, RatVector>>& odds;
        const Skeleton& f;
        const RatVector& base;
        SuperPoint& out;
        std::vector<RatVector> dirs, odd_args;

        void walk_odd(int l, int remaining, IndexMask used, int sign, int m) {
            if (remaining == 0) {
                RatVector val = detail::eval_dm_alt(f.comps[static_cast<std::size_t>(l)], base,
                                                    dirs, odd_args);
                if (vector_is_zero(val)) return;
                Rational c = Rational(sign) / (detail::factorial(m) * detail::factorial(l));
                out.add(used, c * val);
                return;
            }
            for (const auto& [mask, vec] : odds) {
                if (mask & used) continue;
                int s = sign * merge_sign(used, mask);
                odd_args.push_back(vec);
                walk_odd(l, remaining - 1, used | mask, s, m);
                odd_args.pop_back();
            }
        }

        void walk_even(int m, int l, int remaining, IndexMask used, int sign) {
            if (remaining == 0) {
                walk_odd(l, l, used, sign, m);
                return;
            }
            for (const auto& [mask, vec] : evens) {
                if (mask & used) continue;
                int s = sign * merge_sign(used, mask);
                dirs.push_back(vec);
                walk_even(m, l, remaining - 1, used | mask, s);
                dirs.pop_back();
            }
        }
    };

    Walker walker{evens, odds, f, dec.base, out, {}, {}};
    const int max_l = static_cast<int>(f.comps.size()) - 1;
    for (int m = 0; m <= static_cast<int>(evens.size()); ++m)
        for (int l = 0; l <= std::min<int>(max_l, static_cast<int>(odds.size())); ++l) {
            if (m == 0 && l == 0) continue;
            walker.walk_even(m, l, m, 0, 1);
        }
    return out;
}

/// Composition by the permutation-sign sum; the domain condition
/// f0(U_f) in U_g is recorded as an assumption and spot-checked on a grid.
inline Skeleton compose(const Skeleton& g, const Skeleton& f, int domain_grid = 3) {
    if (!(f.target == g.source)) throw dimension_error("skeleton composition space mismatch");
    for (const auto& x : f.box.sample_points(f.source.even_dim, domain_grid)) {
        RatVector y = f.base().eval(x);
        if (!g.box.contains(y))
            throw domain_error("composition domain assumption violated at a sample point");
    }
    Skeleton h(f.source, g.target, f.box);
    h.set_base(g.base().after(f.base()));

    detail::OuterDerivatives outer(&g.comps, f.base());
    const int q = f.source.odd_dim;
    for (int n = 1; n <= q; ++n) {
        std::vector<std::vector<int>> tuples;
        std::vector<int> cur;
        detail::enumerate_increasing_tuples(n, q, cur, tuples);
        for (const auto& tuple : tuples) {
            auto cols = detail::basis_columns(tuple, q, f.source.even_dim);
            auto val = detail::skeleton_sum(outer, f.comps, cols, g.target.parity_dim(n),
                                            f.source.even_dim, g.source.even_dim, {});
            RationalMap entry(f.source.even_dim, std::move(val));
            if (!entry.is_zero()) h.comp(n).set(tuple, std::move(entry));
        }
    }
    return h;
}

/// Inverse skeleton. f0 must be affine with invertible linear part, or a
/// two-sided rational inverse g0 must be supplied; f1 must be pointwise
/// invertible over the rational functions.
inline Skeleton invert(const Skeleton& f, std::optional<RationalMap> g0_hint = std::nullopt,
                       DomainBox target_box = DomainBox()) {
    const int p = f.source.even_dim, q = f.source.odd_dim;
    if (f.target.even_dim != p || f.target.odd_dim != q)
        throw dimension_error("inversion needs equal source and target dimensions");

    RationalMap f0 = f.base();
    RationalMap g0(p, p);
    if (g0_hint) {
        g0 = *g0_hint;
        if (g0.arity() != p || g0.codim() != p) throw dimension_error("inverse hint has wrong shape");
        if (!rmap_equal(f0.after(g0), RationalMap::identity(p)) ||
            !rmap_equal(g0.after(f0), RationalMap::identity(p)))
            throw domain_error("supplied base inverse fails the two-sided identity check");
    } else {
        // affine case: f0 = A x + b
        Matrix<Rational> a(static_cast<std::size_t>(p), RatVector(static_cast<std::size_t>(p)));
        RatVector b(static_cast<std::size_t>(p));
        for (int i = 0; i < p; ++i) {
            const RatFunc& c = f0.comp(i);
            if (!c.is_polynomial() || c.num().total_degree() > 1)
                throw domain_error("base component is not affine; supply an inverse hint");
            for (const auto& [e, coeff] : c.num().terms()) {
                int deg = 0, var = -1;
                for (std::size_t k = 0; k < e.size(); ++k)
                    if (e[k] > 0) {
                        deg += static_cast<int>(e[k]);
                        var = static_cast<int>(k);
                    }
                if (deg == 0)
                    b[static_cast<std::size_t>(i)] = coeff;
                else
                    a[static_cast<std::size_t>(i)][static_cast<std::size_t>(var)] = coeff;
            }
        }
        auto ainv = matrix_inverse(a);
        if (!ainv) throw domain_error("affine base has singular linear part");
        // g0(x') = A^{-1} (x' - b)
        std::vector<RatFunc> comps;
        for (int i = 0; i < p; ++i) {
            Polynomial acc(p);
            for (int j = 0; j < p; ++j) {
                const Rational& aij = (*ainv)[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                acc += aij * Polynomial::variable(p, j);
                acc += (-aij * b[static_cast<std::size_t>(j)]) * Polynomial::constant(p, Rational(1));
            }
            comps.push_back(RatFunc::from_poly(acc));
        }
        g0 = RationalMap(p, std::move(comps));
    }

    Skeleton g(f.target, f.source, std::move(target_box));
    g.set_base(g0);
    if (q == 0) return g;

    // f components precomposed with g0
    std::vector<AltComponent> fsub;
    fsub.reserve(f.comps.size());
    for (const auto& c : f.comps) {
        AltComponent s(c.degree(), c.odd_dim(), p, c.out_dim());
        for (const auto& [tuple, map] : c.entries()) {
            RationalMap composed = map.after(g0);
            if (!composed.is_zero()) s.set(tuple, std::move(composed));
        }
        fsub.push_back(std::move(s));
    }

    // g1(x') = f1(g0(x'))^{-1}
    Matrix<RatFunc> m(static_cast<std::size_t>(q), std::vector<RatFunc>(static_cast<std::size_t>(q), RatFunc(p)));
    for (int s = 1; s <= q; ++s) {
        auto [sign, ptr] = fsub[1].lookup({s});
        if (!ptr) continue;
        for (int t = 0; t < q; ++t)
            m[static_cast<std::size_t>(t)][static_cast<std::size_t>(s - 1)] =
                Rational(sign) * ptr->comp(t);
    }
    auto g1 = matrix_inverse(m);
    if (!g1) throw domain_error("odd linear part is singular over the rational functions");
    for (int s = 1; s <= q; ++s) {
        std::vector<RatFunc> col;
        for (int t = 0; t < q; ++t)
            col.push_back((*g1)[static_cast<std::size_t>(t)][static_cast<std::size_t>(s - 1)]);
        RationalMap entry(p, std::move(col));
        if (!entry.is_zero()) g.comp(1).set({s}, std::move(entry));
    }

    // higher components by the recursion (note the sign and the m, l < n cut)
    detail::OuterDerivatives outer(&g.comps, std::nullopt);
    for (int n = 2; n <= q; ++n) {
        std::vector<std::vector<int>> tuples;
        std::vector<int> cur;
        detail::enumerate_increasing_tuples(n, q, cur, tuples);
        for (const auto& tuple : tuples) {
            std::vector<std::vector<RatFunc>> cols;
            for (int j : tuple) {
                std::vector<RatFunc> col;
                for (int t = 0; t < q; ++t)
                    col.push_back((*g1)[static_cast<std::size_t>(t)][static_cast<std::size_t>(j - 1)]);
                cols.push_back(std::move(col));
            }
            detail::SumOptions opt;
            opt.exclude_high_orders = true;
            auto val = detail::skeleton_sum(outer, fsub, cols, f.source.parity_dim(n), p, p, opt);
            std::vector<RatFunc> neg;
            neg.reserve(val.size());
            for (auto& c : val) neg.push_back(-c);
            RationalMap entry(p, std::move(neg));
            if (!entry.is_zero()) g.comp(n).set(tuple, std::move(entry));
        }
    }
    return g;
}

/// Skeleton of the differential, a U x E-bar family on the doubled source
/// (E_0 x E_0 | E_1 x E_1) with the same target.
inline Skeleton differential(const Skeleton& f) {
    const int p = f.source.even_dim, q = f.source.odd_dim;
    SuperVectorSpace doubled{2 * p, 2 * q};
    Skeleton d(doubled, f.target, f.box.concat(DomainBox(), p, p));
    d.product = std::make_pair(f.source, f.source);

    std::vector<int> image(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) image[static_cast<std::size_t>(i)] = i;

    auto lift = [&](const RationalMap& m) { return m.remap(2 * p, image); };

    // degree 0: d f_0(x)(y)
    {
        RationalMap f0 = f.base();
        std::vector<RatFunc> comps(static_cast<std::size_t>(f.target.even_dim), RatFunc(2 * p));
        for (int o = 0; o < f.target.even_dim; ++o) {
            RatFunc acc(2 * p);
            for (int t = 0; t < p; ++t)
                acc += RatFunc::variable(2 * p, p + t) * lift(f0.partial(t)).comp(o);
            comps[static_cast<std::size_t>(o)] = acc;
        }
        d.set_base(RationalMap(2 * p, std::move(comps)));
    }

    // components above q vanish: both terms are built from f_n itself
    for (int n = 1; n <= q; ++n) {
        AltComponent& target = d.comp(n);
        // first-copy tuples: derivative of f_n in the direction of the new
        // base coordinates
        {
            for (const auto& [tuple, map] : f.comps[static_cast<std::size_t>(n)].entries()) {
                std::vector<RatFunc> comps(static_cast<std::size_t>(map.codim()), RatFunc(2 * p));
                for (int o = 0; o < map.codim(); ++o) {
                    RatFunc acc(2 * p);
                    for (int t = 0; t < p; ++t)
                        acc += RatFunc::variable(2 * p, p + t) * lift(map.partial(t)).comp(o);
                    comps[static_cast<std::size_t>(o)] = acc;
                }
                RationalMap entry(2 * p, std::move(comps));
                if (!entry.is_zero()) target.set(tuple, std::move(entry));
            }
        }
        // tuples with exactly one second-copy vector, which lands in the
        // first alternating slot
        {
            std::vector<std::vector<int>> tails;
            std::vector<int> cur;
            detail::enumerate_increasing_tuples(n - 1, q, cur, tails);
            for (const auto& tail : tails) {
                for (int s = 1; s <= q; ++s) {
                    std::vector<int> probe = {s};
                    probe.insert(probe.end(), tail.begin(), tail.end());
                    auto [sign, ptr] = f.comps[static_cast<std::size_t>(n)].lookup(probe);
                    if (!ptr) continue;
                    int outer_sign = (n - 1) % 2 == 0 ? 1 : -1;
                    RationalMap entry = Rational(outer_sign * sign) *
                                        RatFunc::constant(2 * p, Rational(1)) * lift(*ptr);
                    std::vector<int> tuple(tail);
                    tuple.push_back(q + s);
                    if (!entry.is_zero()) target.set(tuple, std::move(entry));
                }
            }
        }
    }
    return d;
}

/// True iff the skeleton has the two-term fiberwise-linear family shape over
/// its declared product source, equivalently is pointwise even-part-linear
/// in the second argument.
inline bool is_ufamily(const Skeleton& f) {
    if (!f.product) throw domain_error("source is not a declared product");
    const auto [h, e] = *f.product;
    const int ph = h.even_dim, qh = h.odd_dim, pe = e.even_dim;

    auto linear_in_second = [&](const RatFunc& c) {
        for (int v = ph; v < ph + pe; ++v)
            if (c.den().depends_on(v)) return false;
        for (const auto& [exp, coeff] : c.num().terms()) {
            unsigned deg = 0;
            for (int v = ph; v < ph + pe; ++v) deg += exp[static_cast<std::size_t>(v)];
            if (deg != 1) return false;
        }
        return true;
    };
    auto free_of_second = [&](const RatFunc& c) {
        for (int v = ph; v < ph + pe; ++v)
            if (c.num().depends_on(v) || c.den().depends_on(v)) return false;
        return true;
    };

    for (std::size_t k = 0; k < f.comps.size(); ++k) {
        for (const auto& [tuple, map] : f.comps[k].entries()) {
            int second_count = 0;
            for (int j : tuple)
                if (j > qh) ++second_count;
            if (second_count >= 2) return false;
            for (const auto& c : map.comps()) {
                if (second_count == 1) {
                    if (!free_of_second(c)) return false;
                } else {
                    if (!c.is_zero() && !linear_in_second(c)) return false;
                }
            }
        }
    }
    return true;
}

/// The parity-changed family on U x Pi(E)-bar. Involutive.
inline Skeleton parity_change(const Skeleton& f) {
    if (!f.product) throw domain_error("source is not a declared product");
    if (!is_ufamily(f)) throw domain_error("parity change needs a fiberwise-linear family");
    const auto [h, e] = *f.product;
    const int ph = h.even_dim, qh = h.odd_dim, pe = e.even_dim, qe = e.odd_dim;
    const int qf_max = f.source.odd_dim;

    SuperVectorSpace new_e = parity_swap(e);
    SuperVectorSpace new_source = h + new_e;
    SuperVectorSpace new_target = parity_swap(f.target);
    const int np = new_source.even_dim; // ph + qe

    Skeleton out(new_source, new_target, f.box.prefix(ph).concat(DomainBox(), ph, qe));
    out.product = std::make_pair(h, new_e);

    // old variable remap: x stays, the old linear slot coordinates are
    // substituted away (entries used here never depend on them, or are
    // differentiated first)
    std::vector<int> image(static_cast<std::size_t>(ph + pe), -1);
    for (int i = 0; i < ph; ++i) image[static_cast<std::size_t>(i)] = i;
    auto lift = [&](const RationalMap& m) { return m.remap(np, image); };

    for (int l = 0; l <= new_source.odd_dim; ++l) {
        const int out_dim = new_target.parity_dim(l);
        AltComponent& target = out.comp(l);
        // term from f_{l+1}: new even fiber coordinate in the first slot
        if (l + 1 <= qf_max) {
            std::vector<std::vector<int>> tails;
            std::vector<int> cur;
            detail::enumerate_increasing_tuples(l, qh, cur, tails);
            for (const auto& tail : tails) {
                std::vector<RatFunc> comps(static_cast<std::size_t>(out_dim), RatFunc(np));
                bool any = false;
                for (int s = 1; s <= qe; ++s) {
                    std::vector<int> probe = {qh + s};
                    probe.insert(probe.end(), tail.begin(), tail.end());
                    auto [sign, ptr] = f.comps[static_cast<std::size_t>(l + 1)].lookup(probe);
                    if (!ptr) continue;
                    any = true;
                    RatFunc coord = RatFunc::variable(np, ph + s - 1);
                    RationalMap lifted = lift(*ptr);
                    for (int o = 0; o < out_dim; ++o)
                        comps[static_cast<std::size_t>(o)] +=
                            Rational(sign) * (coord * lifted.comp(o));
                }
                if (any) {
                    RationalMap entry(np, comps);
                    if (!entry.is_zero()) target.set(tail, std::move(entry));
                }
            }
        }
        // term from f_{l-1}: one new odd vector carrying an old even fiber
        // coordinate, extracted as the linear coefficient
        if (l >= 1 && l - 1 <= qf_max) {
            std::vector<std::vector<int>> tails;
            std::vector<int> cur;
            detail::enumerate_increasing_tuples(l - 1, qh, cur, tails);
            for (const auto& tail : tails) {
                auto [sign0, ptr] = f.comps[static_cast<std::size_t>(l - 1)].lookup(tail);
                if (!ptr) continue;
                for (int t = 1; t <= pe; ++t) {
                    RationalMap coeff = ptr->partial(ph + t - 1);
                    if (coeff.is_zero()) continue;
                    int outer_sign = (l - 1) % 2 == 0 ? 1 : -1;
                    RationalMap entry = Rational(outer_sign * sign0) *
                                        RatFunc::constant(np, Rational(1)) * lift(coeff);
                    std::vector<int> tuple(tail);
                    tuple.push_back(qh + t);
                    if (!entry.is_zero()) target.set(tuple, std::move(entry));
                }
            }
        }
    }
    return out;
}

/// Block product of skeletons: (f x g)(u, u') = (f(u), g(u')).
inline Skeleton product_skeleton(const Skeleton& f, const Skeleton& g) {
    SuperVectorSpace src = f.source + g.source;
    SuperVectorSpace tgt = f.target + g.target;
    Skeleton out(src, tgt, f.box.concat(g.box, f.source.even_dim, g.source.even_dim));
    const int pf = f.source.even_dim, pg = g.source.even_dim;
    const int qf = f.source.odd_dim;
    std::vector<int> f_image(static_cast<std::size_t>(pf));
    for (int i = 0; i < pf; ++i) f_image[static_cast<std::size_t>(i)] = i;
    std::vector<int> g_image(static_cast<std::size_t>(pg));
    for (int i = 0; i < pg; ++i) g_image[static_cast<std::size_t>(i)] = pf + i;

    // the base components stack; both factors share the empty tuple
    {
        RationalMap fb = f.base().remap(src.even_dim, f_image);
        RationalMap gb = g.base().remap(src.even_dim, g_image);
        std::vector<RatFunc> comps(fb.comps());
        comps.insert(comps.end(), gb.comps().begin(), gb.comps().end());
        out.set_base(RationalMap(src.even_dim, std::move(comps)));
    }
    for (int n = 1; n <= src.odd_dim; ++n) {
        AltComponent& target = out.comp(n);
        const int fe = f.target.parity_dim(n), ge = g.target.parity_dim(n);
        if (n < static_cast<int>(f.comps.size())) {
            for (const auto& [tuple, map] : f.comps[static_cast<std::size_t>(n)].entries()) {
                RationalMap lifted = map.remap(src.even_dim, f_image);
                std::vector<RatFunc> comps(lifted.comps());
                comps.resize(static_cast<std::size_t>(fe + ge), RatFunc(src.even_dim));
                target.set(tuple, RationalMap(src.even_dim, std::move(comps)));
            }
        }
        if (n < static_cast<int>(g.comps.size())) {
            for (const auto& [tuple, map] : g.comps[static_cast<std::size_t>(n)].entries()) {
                RationalMap lifted = map.remap(src.even_dim, g_image);
                std::vector<RatFunc> comps(static_cast<std::size_t>(fe), RatFunc(src.even_dim));
                for (const auto& c : lifted.comps()) comps.push_back(c);
                std::vector<int> tuple_shift(tuple);
                for (auto& j : tuple_shift) j += qf;
                target.set(tuple_shift, RationalMap(src.even_dim, std::move(comps)));
            }
        }
    }
    return out;
}

/// Combines points of H-bar and E-bar into a point of (H + E)-bar.
inline SuperPoint combine_points(const SuperPoint& u, const SuperPoint& w) {
    if (u.level() != w.level()) throw dimension_error("point level mismatch");
    SuperVectorSpace sp = u.space() + w.space();
    SuperPoint out(sp, u.level());
    for (IndexMask m = 0; m < (IndexMask(1) << u.level()); ++m) {
        RatVector a = u.comp(m), b = w.comp(m);
        if (vector_is_zero(a) && vector_is_zero(b)) continue;
        a.insert(a.end(), b.begin(), b.end());
        out.set(m, std::move(a));
    }
    return out;
}

/// Pair morphism (h o pr_H, f) on a product source; h a skeleton on H, f a
/// family on H + E.
inline Skeleton pair_skeleton(const Skeleton& h_map, const Skeleton& f) {
    if (!f.product) throw domain_error("pair target needs a declared product source");
    const auto [h, e] = *f.product;
    if (!(h_map.source == h)) throw dimension_error("first factor mismatch");
    SuperVectorSpace tgt = h_map.target + f.target;
    Skeleton out(f.source, tgt, f.box);
    out.product = f.product;
    const int p = f.source.even_dim, ph = h.even_dim, qh = h.odd_dim;
    std::vector<int> image(static_cast<std::size_t>(ph));
    for (int i = 0; i < ph; ++i) image[static_cast<std::size_t>(i)] = i;

    for (int n = 0; n <= f.source.odd_dim; ++n) {
        AltComponent& target = out.comp(n);
        const int he = h_map.target.parity_dim(n), fe = f.target.parity_dim(n);
        std::map<std::vector<int>, std::pair<RationalMap, RationalMap>> merged;
        if (n < static_cast<int>(h_map.comps.size())) {
            for (const auto& [tuple, map] : h_map.comps[static_cast<std::size_t>(n)].entries()) {
                bool pure_h = true;
                for (int j : tuple)
                    if (j > qh) pure_h = false;
                if (!pure_h) continue;
                merged[tuple].first = map.remap(p, image);
            }
        }
        for (const auto& [tuple, map] : f.comps[static_cast<std::size_t>(n)].entries())
            merged[tuple].second = map;
        for (auto& [tuple, pair] : merged) {
            std::vector<RatFunc> comps(static_cast<std::size_t>(he), RatFunc(p));
            if (pair.first.codim() == he && he > 0)
                for (int o = 0; o < he; ++o) comps[static_cast<std::size_t>(o)] = pair.first.comp(o);
            for (int o = 0; o < fe; ++o) {
                if (pair.second.codim() == fe)
                    comps.push_back(pair.second.comp(o));
                else
                    comps.push_back(RatFunc(p));
            }
            RationalMap entry(p, std::move(comps));
            if (!entry.is_zero()) target.set(tuple, std::move(entry));
        }
    }
    return out;
}

} // namespace sgeom

#endif
