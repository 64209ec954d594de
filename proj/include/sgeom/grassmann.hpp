#ifndef SGEOM_GRASSMANN_HPP
#define SGEOM_GRASSMANN_HPP

#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sgeom/rational.hpp"

namespace sgeom {

/// Default cap on the number of Grassmann generators; 2^n coefficients.
inline constexpr int kDefaultGeneratorCap = 12;

using IndexMask = std::uint32_t;

inline int mask_card(IndexMask m) { return std::popcount(m); }
inline bool mask_even(IndexMask m) { return mask_card(m) % 2 == 0; }

/// Sorted index list {i_1 < ... < i_r} with entries in 1..n.
inline std::vector<int> mask_to_indices(IndexMask m) {
    std::vector<int> out;
    for (int i = 0; m >> i; ++i)
        if (m & (IndexMask(1) << i)) out.push_back(i + 1);
    return out;
}

inline IndexMask indices_to_mask(const std::vector<int>& idx, int n) {
    IndexMask m = 0;
    for (int i : idx) {
        if (i < 1 || i > n) throw dimension_error("generator index out of range");
        IndexMask bit = IndexMask(1) << (i - 1);
        if (m & bit) throw parse_error("repeated index in subset");
        m |= bit;
    }
    return m;
}

/// Sign such that lambda_I * lambda_J = sign * lambda_{I u J}; requires
/// disjoint masks. Counts inversions when merging the two sorted tuples.
inline int merge_sign(IndexMask i, IndexMask j) {
    int inversions = 0;
    IndexMask jj = j;
    while (jj) {
        int b = std::countr_zero(jj);
        jj &= jj - 1;
        inversions += std::popcount(i >> (b + 1));
    }
    return inversions % 2 == 0 ? 1 : -1;
}

/// Element of the Grassmann algebra on n anticommuting generators, stored
/// sparsely as subset -> nonzero rational coefficient.
class GrassmannElement {
public:
    explicit GrassmannElement(int n = 0, int cap = kDefaultGeneratorCap) : n_(n) {
        if (n < 0 || n > cap) throw dimension_error("generator count outside configured cap");
    }

    static GrassmannElement scalar(int n, const Rational& c) {
        GrassmannElement e(n);
        e.set(0, c);
        return e;
    }

    static GrassmannElement basis(int n, IndexMask mask) {
        GrassmannElement e(n);
        if (mask >> n) throw dimension_error("subset exceeds generator count");
        e.set(mask, Rational(1));
        return e;
    }

    static GrassmannElement generator(int n, int i) {
        if (i < 1 || i > n) throw dimension_error("generator index out of range");
        return basis(n, IndexMask(1) << (i - 1));
    }

    int n() const { return n_; }
    const std::map<IndexMask, Rational>& coeffs() const { return coeffs_; }

    Rational coeff(IndexMask mask) const {
        auto it = coeffs_.find(mask);
        return it == coeffs_.end() ? Rational(0) : it->second;
    }

    void set(IndexMask mask, const Rational& c) {
        if (mask >> n_) throw dimension_error("subset exceeds generator count");
        if (sgn(c) == 0)
            coeffs_.erase(mask);
        else
            coeffs_[mask] = c;
    }

    void add(IndexMask mask, const Rational& c) { set(mask, coeff(mask) + c); }

    bool is_zero() const { return coeffs_.empty(); }

    bool is_even() const {
        for (const auto& [m, c] : coeffs_)
            if (!mask_even(m)) return false;
        return true;
    }

    bool is_odd() const {
        for (const auto& [m, c] : coeffs_)
            if (mask_even(m)) return false;
        return true;
    }

    friend GrassmannElement operator+(const GrassmannElement& a, const GrassmannElement& b) {
        a.check(b);
        GrassmannElement r = a;
        for (const auto& [m, c] : b.coeffs_) r.add(m, c);
        return r;
    }

    friend GrassmannElement operator-(const GrassmannElement& a, const GrassmannElement& b) {
        a.check(b);
        GrassmannElement r = a;
        for (const auto& [m, c] : b.coeffs_) r.add(m, -c);
        return r;
    }

    friend GrassmannElement operator*(const Rational& c, const GrassmannElement& a) {
        GrassmannElement r(a.n_);
        for (const auto& [m, ac] : a.coeffs_) r.set(m, c * ac);
        return r;
    }

    /// Bilinear extension of lambda_I * lambda_J = sign * lambda_{I u J},
    /// zero on overlapping subsets.
    friend GrassmannElement operator*(const GrassmannElement& a, const GrassmannElement& b) {
        a.check(b);
        GrassmannElement r(a.n_);
        for (const auto& [ma, ca] : a.coeffs_)
            for (const auto& [mb, cb] : b.coeffs_) {
                if (ma & mb) continue;
                r.add(ma | mb, Rational(merge_sign(ma, mb)) * ca * cb);
            }
        return r;
    }

    GrassmannElement pow(unsigned k) const {
        GrassmannElement r = scalar(n_, Rational(1));
        for (unsigned i = 0; i < k; ++i) r = r * *this;
        return r;
    }

    bool operator==(const GrassmannElement& o) const { return n_ == o.n_ && coeffs_ == o.coeffs_; }
    bool operator!=(const GrassmannElement& o) const { return !(*this == o); }

    GrassmannElement even_part() const { return filtered(true); }
    GrassmannElement odd_part() const { return filtered(false); }
    Rational body() const { return coeff(0); }

    GrassmannElement soul() const {
        GrassmannElement r = *this;
        r.coeffs_.erase(0);
        return r;
    }

    std::string to_string() const {
        if (coeffs_.empty()) return "0";
        std::string out;
        for (const auto& [m, c] : coeffs_) {
            if (!out.empty()) out += " + ";
            out += rat_to_string(c);
            for (int i : mask_to_indices(m)) out += ".l" + std::to_string(i);
        }
        return out;
    }

private:
    GrassmannElement filtered(bool even) const {
        GrassmannElement r(n_);
        for (const auto& [m, c] : coeffs_)
            if (mask_even(m) == even) r.coeffs_.emplace(m, c);
        return r;
    }

    void check(const GrassmannElement& o) const {
        if (n_ != o.n_) throw dimension_error("Grassmann generator count mismatch");
    }

    int n_;
    std::map<IndexMask, Rational> coeffs_;
};

struct GrassmannSplit {
    GrassmannElement even, odd, soul;
    Rational body;
};

/// Parity split together with the body/soul decomposition.
inline GrassmannSplit split(const GrassmannElement& a) {
    return GrassmannSplit{a.even_part(), a.odd_part(), a.soul(), a.body()};
}

/// Even unital algebra morphism between Grassmann algebras, determined by
/// the (odd) images of the generators.
class GrassmannMorphism {
public:
    GrassmannMorphism(int n_src, int n_tgt, std::vector<GrassmannElement> images)
        : n_src_(n_src), n_tgt_(n_tgt), images_(std::move(images)) {
        if (static_cast<int>(images_.size()) != n_src_)
            throw dimension_error("morphism needs one image per source generator");
        for (const auto& img : images_) {
            if (img.n() != n_tgt_) throw dimension_error("image lives in the wrong algebra");
            if (!img.is_odd()) throw domain_error("generator image must be odd");
        }
    }

    static GrassmannMorphism identity(int n) {
        std::vector<GrassmannElement> imgs;
        for (int i = 1; i <= n; ++i) imgs.push_back(GrassmannElement::generator(n, i));
        return GrassmannMorphism(n, n, std::move(imgs));
    }

    int n_src() const { return n_src_; }
    int n_tgt() const { return n_tgt_; }
    const std::vector<GrassmannElement>& images() const { return images_; }

    /// Unique multiplicative unital extension of the generator images.
    GrassmannElement apply(const GrassmannElement& a) const {
        if (a.n() != n_src_) throw dimension_error("element level does not match morphism source");
        GrassmannElement out(n_tgt_);
        for (const auto& [m, c] : a.coeffs()) {
            GrassmannElement prod = GrassmannElement::scalar(n_tgt_, c);
            for (int i : mask_to_indices(m)) prod = prod * images_[static_cast<std::size_t>(i - 1)];
            out = out + prod;
        }
        return out;
    }

    /// this after rho.
    GrassmannMorphism compose(const GrassmannMorphism& rho) const {
        if (rho.n_tgt() != n_src_) throw dimension_error("morphism composition level mismatch");
        std::vector<GrassmannElement> imgs;
        imgs.reserve(rho.images().size());
        for (const auto& img : rho.images()) imgs.push_back(apply(img));
        return GrassmannMorphism(rho.n_src(), n_tgt_, std::move(imgs));
    }

    bool operator==(const GrassmannMorphism& o) const {
        return n_src_ == o.n_src_ && n_tgt_ == o.n_tgt_ && images_ == o.images_;
    }

private:
    int n_src_, n_tgt_;
    std::vector<GrassmannElement> images_;
};

enum class CanonicalKind { eps, eta };

/// eps_{m,n}: kill generators above n (requires m >= n).
/// eta_{n,m}: include Lambda_n into Lambda_m (requires n <= m).
inline GrassmannMorphism canonical_morphism(CanonicalKind kind, int a, int b) {
    if (kind == CanonicalKind::eps) {
        const int m = a, n = b;
        if (m < n) throw domain_error("eps_{m,n} requires m >= n");
        std::vector<GrassmannElement> imgs;
        for (int k = 1; k <= m; ++k)
            imgs.push_back(k <= n ? GrassmannElement::generator(n, k) : GrassmannElement(n));
        return GrassmannMorphism(m, n, std::move(imgs));
    }
    const int n = a, m = b;
    if (n > m) throw domain_error("eta_{n,m} requires n <= m");
    std::vector<GrassmannElement> imgs;
    for (int k = 1; k <= n; ++k) imgs.push_back(GrassmannElement::generator(m, k));
    return GrassmannMorphism(n, m, std::move(imgs));
}

inline GrassmannMorphism eps_morphism(int m, int n) { return canonical_morphism(CanonicalKind::eps, m, n); }
inline GrassmannMorphism eta_morphism(int n, int m) { return canonical_morphism(CanonicalKind::eta, n, m); }

} // namespace sgeom

#endif
