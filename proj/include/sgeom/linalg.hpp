#ifndef SGEOM_LINALG_HPP
#define SGEOM_LINALG_HPP

#include <optional>
#include <vector>

#include "sgeom/ratfunc.hpp"

namespace sgeom {

template <class S>
using Matrix = std::vector<std::vector<S>>;

namespace detail {

template <class S>
bool scalar_is_zero(const S& s) {
    return s.is_zero();
}
inline bool scalar_is_zero(const Rational& r) { return sgn(r) == 0; }

template <class S>
S scalar_one(const S& like) {
    return S::constant(like.nvars(), Rational(1));
}
inline Rational scalar_one(const Rational&) { return Rational(1); }

} // namespace detail

/// Determinant by Laplace expansion; fine for the small sizes used here.
template <class S>
S determinant(const Matrix<S>& m) {
    const std::size_t n = m.size();
    if (n == 0) throw dimension_error("determinant of empty matrix");
    if (n == 1) return m[0][0];
    S acc = m[0][0];
    acc = acc - acc; // typed zero
    std::vector<std::size_t> cols(n);
    for (std::size_t i = 0; i < n; ++i) cols[i] = i;
    // expand along the first row
    for (std::size_t j = 0; j < n; ++j) {
        if (detail::scalar_is_zero(m[0][j])) continue;
        Matrix<S> sub;
        sub.reserve(n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<S> row;
            row.reserve(n - 1);
            for (std::size_t c = 0; c < n; ++c)
                if (c != j) row.push_back(m[r][c]);
            sub.push_back(std::move(row));
        }
        S term = m[0][j] * determinant(sub);
        if (j % 2 == 0)
            acc = acc + term;
        else
            acc = acc - term;
    }
    return acc;
}

/// Gauss-Jordan inverse over an exact field; nullopt when singular.
template <class S>
std::optional<Matrix<S>> matrix_inverse(Matrix<S> a) {
    const std::size_t n = a.size();
    for (const auto& row : a)
        if (row.size() != n) throw dimension_error("matrix not square");
    if (n == 0) return Matrix<S>{};
    S one = detail::scalar_one(a[0][0]);
    S zero = one - one;
    Matrix<S> inv(n, std::vector<S>(n, zero));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = one;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && detail::scalar_is_zero(a[piv][col])) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        S d = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] = a[col][j] / d;
            inv[col][j] = inv[col][j] / d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || detail::scalar_is_zero(a[r][col])) continue;
            S f = a[r][col];
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] = a[r][j] - f * a[col][j];
                inv[r][j] = inv[r][j] - f * inv[col][j];
            }
        }
    }
    return inv;
}

template <class S>
std::vector<S> matrix_apply(const Matrix<S>& m, const std::vector<S>& v) {
    std::vector<S> out;
    out.reserve(m.size());
    for (const auto& row : m) {
        if (row.size() != v.size()) throw dimension_error("matrix/vector shape mismatch");
        S acc = row[0] * v[0];
        for (std::size_t j = 1; j < row.size(); ++j) acc = acc + row[j] * v[j];
        out.push_back(std::move(acc));
    }
    return out;
}

/// One rational kernel vector of a singular square matrix, if any.
inline std::optional<RatVector> kernel_vector(Matrix<Rational> a) {
    const std::size_t n = a.size();
    if (n == 0) return std::nullopt;
    std::vector<std::size_t> pivot_col_of_row;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < n; ++col) {
        std::size_t piv = row;
        while (piv < n && sgn(a[piv][col]) == 0) ++piv;
        if (piv == n) continue;
        std::swap(a[piv], a[row]);
        Rational d = a[row][col];
        for (std::size_t j = 0; j < n; ++j) a[row][j] /= d;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == row || sgn(a[r][col]) == 0) continue;
            Rational f = a[r][col];
            for (std::size_t j = 0; j < n; ++j) a[r][j] -= f * a[row][j];
        }
        pivot_col_of_row.push_back(col);
        ++row;
    }
    if (pivot_col_of_row.size() == n) return std::nullopt;
    // find the first non-pivot column and back-substitute
    std::vector<bool> is_pivot(n, false);
    for (auto c : pivot_col_of_row) is_pivot[c] = true;
    std::size_t free_col = 0;
    while (free_col < n && is_pivot[free_col]) ++free_col;
    RatVector v = zero_vector(static_cast<int>(n));
    v[free_col] = Rational(1);
    for (std::size_t r = 0; r < pivot_col_of_row.size(); ++r)
        v[pivot_col_of_row[r]] = -a[r][free_col];
    return v;
}

} // namespace sgeom

#endif
