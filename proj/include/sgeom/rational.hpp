#ifndef SGEOM_RATIONAL_HPP
#define SGEOM_RATIONAL_HPP

#include <gmpxx.h>

#include <string>
#include <vector>

#include "sgeom/error.hpp"

namespace sgeom {

/// Exact arbitrary-precision rational scalar. No floating point anywhere.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline bool is_zero(const Rational& r) { return sgn(r) == 0; }

/// Parses "p", "-p" or "p/q". Throws parse_error on malformed input or q = 0.
inline Rational rat_from_string(const std::string& s) {
    if (s.empty()) throw parse_error("empty rational literal");
    for (char c : s)
        if (!(c == '-' || c == '/' || (c >= '0' && c <= '9')))
            throw parse_error("malformed rational literal: " + s);
    mpq_class r;
    if (r.set_str(s, 10) != 0) throw parse_error("malformed rational literal: " + s);
    if (sgn(r.get_den()) == 0) throw parse_error("zero denominator in literal: " + s);
    r.canonicalize();
    return r;
}

/// Canonical form: "p" when the denominator is one, else "p/q" with q > 0.
inline std::string rat_to_string(const Rational& r) { return r.get_str(); }

using RatVector = std::vector<Rational>;

inline RatVector zero_vector(int dim) { return RatVector(static_cast<std::size_t>(dim), Rational(0)); }

inline bool vector_is_zero(const RatVector& v) {
    for (const auto& c : v)
        if (!is_zero(c)) return false;
    return true;
}

inline RatVector operator+(const RatVector& a, const RatVector& b) {
    if (a.size() != b.size()) throw dimension_error("vector size mismatch");
    RatVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline RatVector operator-(const RatVector& a, const RatVector& b) {
    if (a.size() != b.size()) throw dimension_error("vector size mismatch");
    RatVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline RatVector operator*(const Rational& c, const RatVector& v) {
    RatVector r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = c * v[i];
    return r;
}

} // namespace sgeom

#endif
