#ifndef SGEOM_SUPERLIN_HPP
#define SGEOM_SUPERLIN_HPP

#include <algorithm>
#include <map>
#include <vector>

#include "sgeom/box.hpp"
#include "sgeom/grassmann.hpp"
#include "sgeom/linalg.hpp"
#include "sgeom/ratfunc.hpp"

namespace sgeom {

/// Finite-dimensional super vector space E = E_0 + E_1.
struct SuperVectorSpace {
    int even_dim = 0; // dim E_0
    int odd_dim = 0;  // dim E_1

    int parity_dim(int parity) const { return parity % 2 == 0 ? even_dim : odd_dim; }

    bool operator==(const SuperVectorSpace& o) const {
        return even_dim == o.even_dim && odd_dim == o.odd_dim;
    }
    bool operator!=(const SuperVectorSpace& o) const { return !(*this == o); }

    friend SuperVectorSpace operator+(const SuperVectorSpace& a, const SuperVectorSpace& b) {
        return {a.even_dim + b.even_dim, a.odd_dim + b.odd_dim};
    }
};

/// Parity swap E_0 <-> E_1.
inline SuperVectorSpace parity_swap(const SuperVectorSpace& e) { return {e.odd_dim, e.even_dim}; }

/// Element of E-bar at level n: per-subset vectors, even subsets carrying
/// E_0 coordinates and odd subsets E_1 coordinates. Sparse canonical form.
class SuperPoint {
public:
    SuperPoint(SuperVectorSpace space, int level) : space_(space), level_(level) {
        if (level < 0 || level > kDefaultGeneratorCap)
            throw dimension_error("Grassmann level outside configured cap");
    }

    static SuperPoint real(SuperVectorSpace space, int level, RatVector x) {
        SuperPoint p(space, level);
        p.set(0, std::move(x));
        return p;
    }

    const SuperVectorSpace& space() const { return space_; }
    int level() const { return level_; }
    const std::map<IndexMask, RatVector>& comps() const { return comps_; }

    int dim_at(IndexMask mask) const { return space_.parity_dim(mask_card(mask)); }

    RatVector comp(IndexMask mask) const {
        auto it = comps_.find(mask);
        if (it != comps_.end()) return it->second;
        return zero_vector(dim_at(mask));
    }

    void set(IndexMask mask, RatVector v) {
        if (mask >> level_) throw dimension_error("subset exceeds Grassmann level");
        if (static_cast<int>(v.size()) != dim_at(mask))
            throw dimension_error("component dimension violates the parity rule");
        if (vector_is_zero(v))
            comps_.erase(mask);
        else
            comps_[mask] = std::move(v);
    }

    void add(IndexMask mask, const RatVector& v) { set(mask, comp(mask) + v); }

    bool is_zero() const { return comps_.empty(); }

    friend SuperPoint operator+(const SuperPoint& a, const SuperPoint& b) {
        a.check(b);
        SuperPoint r = a;
        for (const auto& [m, v] : b.comps_) r.add(m, v);
        return r;
    }

    friend SuperPoint operator-(const SuperPoint& a, const SuperPoint& b) {
        a.check(b);
        SuperPoint r = a;
        for (const auto& [m, v] : b.comps_) r.add(m, rat(-1) * v);
        return r;
    }

    bool operator==(const SuperPoint& o) const {
        return space_ == o.space_ && level_ == o.level_ && comps_ == o.comps_;
    }
    bool operator!=(const SuperPoint& o) const { return !(*this == o); }

private:
    void check(const SuperPoint& o) const {
        if (!(space_ == o.space_) || level_ != o.level_)
            throw dimension_error("super point space or level mismatch");
    }

    SuperVectorSpace space_;
    int level_;
    std::map<IndexMask, RatVector> comps_;
};

/// Action of an even Grassmann element on a point of E-bar.
inline SuperPoint module_action(const GrassmannElement& t, const SuperPoint& v) {
    if (!t.is_even()) throw domain_error("module action needs an even element");
    if (t.n() != v.level()) throw dimension_error("module action level mismatch");
    SuperPoint out(v.space(), v.level());
    for (const auto& [mt, c] : t.coeffs())
        for (const auto& [mv, vec] : v.comps()) {
            if (mt & mv) continue;
            out.add(mt | mv, (Rational(merge_sign(mt, mv)) * c) * vec);
        }
    return out;
}

/// E-bar applied to a Grassmann morphism: id_E tensor rho.
inline SuperPoint apply_point_morphism(const GrassmannMorphism& rho, const SuperPoint& v) {
    if (rho.n_src() != v.level()) throw dimension_error("point level does not match morphism source");
    SuperPoint out(v.space(), rho.n_tgt());
    for (const auto& [mask, vec] : v.comps()) {
        GrassmannElement img = rho.apply(GrassmannElement::basis(rho.n_src(), mask));
        for (const auto& [mi, c] : img.coeffs()) out.add(mi, c * vec);
    }
    return out;
}

struct PointDecomposition {
    RatVector base;   // component at the empty set
    SuperPoint even_nilpotent; // non-empty even part
    SuperPoint odd_part;       // odd part
};

/// x + n_0 + n_1 with x real, n_0 even nilpotent, n_1 odd.
inline PointDecomposition decompose_point(const SuperPoint& v) {
    PointDecomposition d{v.comp(0), SuperPoint(v.space(), v.level()), SuperPoint(v.space(), v.level())};
    for (const auto& [m, vec] : v.comps()) {
        if (m == 0) continue;
        if (mask_even(m))
            d.even_nilpotent.set(m, vec);
        else
            d.odd_part.set(m, vec);
    }
    return d;
}

/// Dense k-multilinear coefficient tensor on a dim-dimensional slot space
/// with values in Q^out_dim; entries indexed by (slot indices..., out).
template <class S>
struct MultiTensor {
    int k = 0;
    int dim = 0;
    int out_dim = 0;
    std::vector<S> entries;

    MultiTensor() = default;
    MultiTensor(int k_, int dim_, int out_dim_, S zero)
        : k(k_), dim(dim_), out_dim(out_dim_) {
        std::size_t total = static_cast<std::size_t>(out_dim);
        for (int i = 0; i < k; ++i) total *= static_cast<std::size_t>(dim);
        entries.assign(total, zero);
    }

    std::size_t offset(const std::vector<int>& idx, int out) const {
        std::size_t o = 0;
        for (int i : idx) o = o * static_cast<std::size_t>(dim) + static_cast<std::size_t>(i);
        return o * static_cast<std::size_t>(out_dim) + static_cast<std::size_t>(out);
    }

    const S& at(const std::vector<int>& idx, int out) const { return entries[offset(idx, out)]; }
    S& at(const std::vector<int>& idx, int out) { return entries[offset(idx, out)]; }

    bool operator==(const MultiTensor& o) const {
        return k == o.k && dim == o.dim && out_dim == o.out_dim && entries == o.entries;
    }
};

namespace detail {

inline bool next_multi_index(std::vector<int>& idx, int dim) {
    for (std::size_t i = idx.size(); i-- > 0;) {
        if (++idx[i] < dim) return true;
        idx[i] = 0;
    }
    return false;
}

inline int permutation_sign(const std::vector<int>& perm) {
    int inv = 0;
    for (std::size_t i = 0; i < perm.size(); ++i)
        for (std::size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j]) ++inv;
    return inv % 2 == 0 ? 1 : -1;
}

template <class F>
void for_each_permutation(int k, F&& fn) {
    std::vector<int> perm(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = i;
    do {
        fn(static_cast<const std::vector<int>&>(perm), permutation_sign(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
}

} // namespace detail

/// Projection onto alternating tensors: sum over permutations of sgn/k!.
/// Idempotent; fixes alternating inputs; the identity for k <= 1.
template <class S>
MultiTensor<S> alternator(const MultiTensor<S>& t) {
    if (t.k <= 1) return t;
    S zero = t.entries.empty() ? S{} : t.entries[0] - t.entries[0];
    MultiTensor<S> out(t.k, t.dim, t.out_dim, zero);
    Rational factorial(1);
    for (int i = 2; i <= t.k; ++i) factorial *= i;
    std::vector<int> idx(static_cast<std::size_t>(t.k), 0);
    if (t.dim == 0 || t.out_dim == 0) return out;
    do {
        for (int o = 0; o < t.out_dim; ++o) {
            S acc = zero;
            detail::for_each_permutation(t.k, [&](const std::vector<int>& perm, int sign) {
                std::vector<int> pidx(idx.size());
                for (std::size_t i = 0; i < idx.size(); ++i)
                    pidx[i] = idx[static_cast<std::size_t>(perm[i])];
                const S& term = t.at(pidx, o);
                if (sign > 0)
                    acc = acc + term;
                else
                    acc = acc - term;
            });
            out.at(idx, o) = (Rational(1) / factorial) * acc;
        }
    } while (detail::next_multi_index(idx, t.dim));
    return out;
}

/// Degree-k alternating component of a skeleton: one vector-valued rational
/// map per strictly increasing k-tuple of odd basis indices (1-based).
/// Evaluation on arbitrary tuples goes through sign-sorted lookup, so the
/// antisymmetric extension is by construction.
class AltComponent {
public:
    AltComponent() = default;
    AltComponent(int degree, int odd_dim, int base_arity, int out_dim)
        : degree_(degree), odd_dim_(odd_dim), base_arity_(base_arity), out_dim_(out_dim) {}

    int degree() const { return degree_; }
    int odd_dim() const { return odd_dim_; }
    int base_arity() const { return base_arity_; }
    int out_dim() const { return out_dim_; }
    const std::map<std::vector<int>, RationalMap>& entries() const { return entries_; }

    bool is_zero() const { return entries_.empty(); }

    void set(std::vector<int> tuple, RationalMap value) {
        if (static_cast<int>(tuple.size()) != degree_) throw dimension_error("tuple length mismatch");
        for (std::size_t i = 0; i < tuple.size(); ++i) {
            if (tuple[i] < 1 || tuple[i] > odd_dim_) throw dimension_error("basis index out of range");
            if (i + 1 < tuple.size() && tuple[i] >= tuple[i + 1])
                throw dimension_error("tuple must be strictly increasing");
        }
        if (value.arity() != base_arity_ || value.codim() != out_dim_)
            throw dimension_error("entry map has the wrong shape");
        if (value.is_zero())
            entries_.erase(tuple);
        else
            entries_[std::move(tuple)] = std::move(value);
    }

    /// Sign-sorted lookup for an arbitrary tuple; nullptr means zero.
    std::pair<int, const RationalMap*> lookup(std::vector<int> tuple) const {
        int sign = 1;
        for (std::size_t i = 1; i < tuple.size(); ++i)
            for (std::size_t j = i; j > 0 && tuple[j - 1] > tuple[j]; --j) {
                std::swap(tuple[j - 1], tuple[j]);
                sign = -sign;
            }
        for (std::size_t i = 1; i < tuple.size(); ++i)
            if (tuple[i - 1] == tuple[i]) return {0, nullptr};
        auto it = entries_.find(tuple);
        if (it == entries_.end()) return {0, nullptr};
        return {sign, &it->second};
    }

    /// Alternating evaluation on column vectors over any exact scalar field,
    /// via the determinant expansion across increasing tuples. The mapper
    /// turns each stored entry into a vector of scalars.
    template <class S, class EntryFn>
    std::vector<S> eval_columns(const std::vector<std::vector<S>>& cols, const S& zero,
                                EntryFn&& entry_to_scalars) const {
        std::vector<S> out(static_cast<std::size_t>(out_dim_), zero);
        if (static_cast<int>(cols.size()) != degree_)
            throw dimension_error("wrong number of arguments");
        for (const auto& [tuple, map] : entries_) {
            std::vector<S> vals = entry_to_scalars(map);
            if (degree_ == 0) {
                for (int o = 0; o < out_dim_; ++o)
                    out[static_cast<std::size_t>(o)] =
                        out[static_cast<std::size_t>(o)] + vals[static_cast<std::size_t>(o)];
                continue;
            }
            // det of the degree x degree minor picked by `tuple`
            Matrix<S> minor(static_cast<std::size_t>(degree_),
                            std::vector<S>(static_cast<std::size_t>(degree_), zero));
            for (int r = 0; r < degree_; ++r)
                for (int c = 0; c < degree_; ++c)
                    minor[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                        cols[static_cast<std::size_t>(r)]
                            [static_cast<std::size_t>(tuple[static_cast<std::size_t>(c)] - 1)];
            S det = determinant(minor);
            for (int o = 0; o < out_dim_; ++o)
                out[static_cast<std::size_t>(o)] =
                    out[static_cast<std::size_t>(o)] + det * vals[static_cast<std::size_t>(o)];
        }
        return out;
    }

    bool operator==(const AltComponent& o) const {
        return degree_ == o.degree_ && odd_dim_ == o.odd_dim_ && base_arity_ == o.base_arity_ &&
               out_dim_ == o.out_dim_ && entries_ == o.entries_;
    }
    bool operator!=(const AltComponent& o) const { return !(*this == o); }

private:
    int degree_ = 0;
    int odd_dim_ = 0;
    int base_arity_ = 0;
    int out_dim_ = 0;
    std::map<std::vector<int>, RationalMap> entries_;
};

} // namespace sgeom

#endif
