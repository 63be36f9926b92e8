#pragma once

#include <stdexcept>
#include <string>

namespace stokesrbf {

struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A pivot collapsed below the precision floor during factorization.
struct SingularMatrix : NumericsError {
    explicit SingularMatrix(const std::string& what, double cond = -1.0)
        : NumericsError(what), cond_estimate(cond) {}
    double cond_estimate;
};

struct NoConvergence : NumericsError {
    using NumericsError::NumericsError;
};

struct UnsupportedPair : NumericsError {
    using NumericsError::NumericsError;
};

struct UnsupportedOrder : NumericsError {
    using NumericsError::NumericsError;
};

struct BadGeometry : NumericsError {
    using NumericsError::NumericsError;
};

struct ParseError : NumericsError {
    ParseError(const std::string& what, long line_no = -1)
        : NumericsError(line_no >= 0 ? what + " (line " + std::to_string(line_no) + ")" : what),
          line(line_no) {}
    long line;
};

struct StencilTooSmall : NumericsError {
    using NumericsError::NumericsError;
};

struct DegenerateGeometry : NumericsError {
    using NumericsError::NumericsError;
};

struct HistoryMissing : NumericsError {
    using NumericsError::NumericsError;
};

struct ShapeMismatch : NumericsError {
    using NumericsError::NumericsError;
};

struct ConfigError : NumericsError {
    using NumericsError::NumericsError;
};

}  // namespace stokesrbf
