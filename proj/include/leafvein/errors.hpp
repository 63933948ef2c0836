#pragma once

#include <stdexcept>
#include <string>

namespace leafvein {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Polygon construction or use with fewer than 3 vertices, non-finite
/// coordinates, or zero area.
class InvalidPolygonError : public Error {
public:
    using Error::Error;
};

/// Two masks (or a mask and a probability grid) of different dimensions.
class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// Inward offset consumed the whole polygon.
class ShrinkCollapseError : public Error {
public:
    using Error::Error;
};

/// Ray cast from a point that is not strictly inside the polygon, or a ray
/// that unexpectedly escaped the contour.
class RayCastError : public Error {
public:
    using Error::Error;
};

/// A kernel mask with no usable pixels (empty, or degenerate extent).
class EmptyKernelError : public Error {
public:
    using Error::Error;
};

/// Polynomial fit requested with fewer samples than coefficients.
class UnderdeterminedFitError : public Error {
public:
    using Error::Error;
};

/// Instance cannot be encoded (kernel collapsed or too small to sample).
class EncodeDegenerateError : public Error {
public:
    using Error::Error;
};

/// Length lookup had no record for a required (point, direction) query.
class MissingLengthError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// File or stream I/O failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed annotation line. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, int line_number = 0)
        : Error(line_number > 0 ? "line " + std::to_string(line_number) + ": " + what : what),
          line_number_(line_number) {}

    int line_number() const { return line_number_; }

private:
    int line_number_ = 0;
};

}  // namespace leafvein
