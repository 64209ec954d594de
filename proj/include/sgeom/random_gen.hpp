#ifndef SGEOM_RANDOM_GEN_HPP
#define SGEOM_RANDOM_GEN_HPP

#include <random>

#include "sgeom/skeleton.hpp"

namespace sgeom {

/// Deterministic generator for the randomized suites; raw engine output is
/// reduced by modulus so runs are stable across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    long pick(long lo, long hi) { // inclusive
        return lo + static_cast<long>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    Rational rational(long span = 3) { return rat(pick(-span, span)); }

    Rational nonzero_rational(long span = 3) {
        Rational r = rational(span);
        if (sgn(r) == 0) r = rat(1);
        return r;
    }

    RatVector vector(int dim, long span = 3) {
        RatVector v;
        for (int i = 0; i < dim; ++i) v.push_back(rational(span));
        return v;
    }

    Polynomial polynomial(int nvars, int max_degree, int terms = 3, long span = 2) {
        Polynomial p(nvars);
        for (int t = 0; t < terms; ++t) {
            Polynomial::Exponents e(static_cast<std::size_t>(nvars), 0u);
            int budget = max_degree <= 0 ? 0 : static_cast<int>(pick(0, max_degree));
            for (int b = 0; b < budget && nvars > 0; ++b)
                ++e[static_cast<std::size_t>(pick(0, nvars - 1))];
            p.add_term(std::move(e), rational(span));
        }
        return p;
    }

    RationalMap poly_map(int arity, int codim, int max_degree) {
        std::vector<RatFunc> comps;
        for (int i = 0; i < codim; ++i)
            comps.push_back(RatFunc::from_poly(polynomial(arity, max_degree)));
        return RationalMap(arity, std::move(comps));
    }

    /// Random skeleton with polynomial entries; domain is the whole space.
    Skeleton skeleton(SuperVectorSpace src, SuperVectorSpace tgt, int max_degree) {
        Skeleton f(src, tgt);
        f.set_base(poly_map(src.even_dim, tgt.even_dim, max_degree));
        for (int k = 1; k <= src.odd_dim; ++k) {
            std::vector<std::vector<int>> tuples;
            std::vector<int> cur;
            detail::enumerate_increasing_tuples(k, src.odd_dim, cur, tuples);
            for (const auto& tuple : tuples) {
                RationalMap entry = poly_map(src.even_dim, tgt.parity_dim(k), max_degree);
                if (!entry.is_zero()) f.comp(k).set(tuple, std::move(entry));
            }
        }
        return f;
    }

    /// Invertible skeleton: affine unimodular base, odd linear part equal to
    /// the identity plus a strictly triangular polynomial offset.
    Skeleton invertible_skeleton(int p, int q, int max_degree) {
        SuperVectorSpace sp{p, q};
        Skeleton f(sp, sp);
        // unit upper-triangular base matrix keeps the determinant one
        std::vector<RatFunc> base;
        for (int i = 0; i < p; ++i) {
            Polynomial acc = Polynomial::variable(p, i);
            for (int j = i + 1; j < p; ++j)
                acc += rational(2) * Polynomial::variable(p, j);
            acc += rational(3) * Polynomial::constant(p, Rational(1));
            base.push_back(RatFunc::from_poly(acc));
        }
        f.set_base(RationalMap(p, std::move(base)));
        for (int s = 1; s <= q; ++s) {
            RatVector col = zero_vector(q);
            col[static_cast<std::size_t>(s - 1)] = Rational(1);
            RationalMap entry = RationalMap::constant(p, col);
            for (int t = s + 1; t <= q; ++t) {
                RatFunc off = RatFunc::from_poly(polynomial(p, max_degree, 2));
                entry.comp(t - 1) += off;
            }
            f.comp(1).set({s}, entry);
        }
        for (int k = 2; k <= q; ++k) {
            std::vector<std::vector<int>> tuples;
            std::vector<int> cur;
            detail::enumerate_increasing_tuples(k, q, cur, tuples);
            for (const auto& tuple : tuples) {
                RationalMap entry = poly_map(p, sp.parity_dim(k), max_degree);
                if (!entry.is_zero()) f.comp(k).set(tuple, std::move(entry));
            }
        }
        return f;
    }

    /// Generic fiberwise-linear family on H + E with the exact two-term
    /// structure: pure-H entries linear in the fiber coordinates, one-fiber
    /// entries independent of them, everything else zero.
    Skeleton ufamily(SuperVectorSpace h, SuperVectorSpace e, SuperVectorSpace tgt, int max_degree) {
        SuperVectorSpace src = h + e;
        Skeleton f(src, tgt);
        f.product = std::make_pair(h, e);
        const int ph = h.even_dim, qh = h.odd_dim, pe = e.even_dim, qe = e.odd_dim;
        const int p = src.even_dim;

        auto linear_entry = [&](int out_dim) {
            std::vector<RatFunc> comps;
            for (int o = 0; o < out_dim; ++o) {
                Polynomial acc(p);
                for (int t = 0; t < pe; ++t)
                    acc += polynomial(ph, max_degree, 2).with_nvars(p) *
                           Polynomial::variable(p, ph + t);
                comps.push_back(RatFunc::from_poly(acc));
            }
            return RationalMap(p, std::move(comps));
        };
        auto base_entry = [&](int out_dim) {
            std::vector<RatFunc> comps;
            for (int o = 0; o < out_dim; ++o)
                comps.push_back(RatFunc::from_poly(polynomial(ph, max_degree, 2).with_nvars(p)));
            return RationalMap(p, std::move(comps));
        };

        f.set_base(linear_entry(tgt.even_dim));
        for (int n = 1; n <= src.odd_dim; ++n) {
            std::vector<std::vector<int>> tuples;
            std::vector<int> cur;
            detail::enumerate_increasing_tuples(n, src.odd_dim, cur, tuples);
            for (const auto& tuple : tuples) {
                int fiber_count = 0;
                for (int j : tuple)
                    if (j > qh) ++fiber_count;
                if (fiber_count >= 2) continue;
                RationalMap entry = fiber_count == 1 ? base_entry(tgt.parity_dim(n))
                                                     : linear_entry(tgt.parity_dim(n));
                if (!entry.is_zero()) f.comp(n).set(tuple, std::move(entry));
            }
        }
        return f;
    }

    GrassmannElement grassmann(int n, bool even_only = false, bool odd_only = false) {
        GrassmannElement e(n);
        for (int t = 0; t < 4; ++t) {
            IndexMask m = static_cast<IndexMask>(
                static_cast<std::uint64_t>(pick(0, (1L << n) - 1)));
            if (even_only && !mask_even(m)) continue;
            if (odd_only && mask_even(m)) continue;
            e.add(m, rational(3));
        }
        return e;
    }

    GrassmannMorphism grassmann_morphism(int n_src, int n_tgt) {
        std::vector<GrassmannElement> imgs;
        for (int i = 0; i < n_src; ++i) imgs.push_back(grassmann(n_tgt, false, true));
        return GrassmannMorphism(n_src, n_tgt, std::move(imgs));
    }

    SuperPoint point(SuperVectorSpace sp, int level, long span = 2) {
        SuperPoint p(sp, level);
        for (IndexMask m = 0; m < (IndexMask(1) << level); ++m)
            p.set(m, vector(sp.parity_dim(mask_card(m)), span));
        return p;
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

} // namespace sgeom

#endif
