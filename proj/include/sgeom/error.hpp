#ifndef SGEOM_ERROR_HPP
#define SGEOM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sgeom {

// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched generator counts, space dimensions or arities.
struct dimension_error : error {
    using error::error;
};

// Evaluation at a point where a denominator vanishes.
struct pole_error : error {
    using error::error;
};

// Base point outside the declared domain, non-invertible data, or a
// violated structural precondition.
struct domain_error : error {
    using error::error;
};

// Malformed input documents.
struct parse_error : error {
    using error::error;
};

} // namespace sgeom

#endif
