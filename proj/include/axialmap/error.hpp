#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace axialmap {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Zero-length segment, non-finite coordinate, too few points.
class GeometryError : public Error {
public:
    using Error::Error;
};

// A bend measure was requested on a polyline whose endpoints coincide.
class ClosedLoopError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public DomainError {
public:
    using DomainError::DomainError;
};

// No street qualifies for computing chop thresholds.
class ThresholdsUnavailable : public Error {
public:
    using Error::Error;
};

// An internal invariant was breached (a bug, not bad input).
class InvariantError : public Error {
public:
    using Error::Error;
};

// Unreadable or malformed input. `feature_index` is the offending
// feature or row when known.
class InputError : public Error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit InputError(const std::string& what, std::size_t feature_index = npos)
        : Error(feature_index == npos ? what
                                      : what + " (feature " + std::to_string(feature_index) + ")"),
          feature_index_(feature_index) {}

    std::size_t feature_index() const noexcept { return feature_index_; }

private:
    std::size_t feature_index_;
};

}  // namespace axialmap
