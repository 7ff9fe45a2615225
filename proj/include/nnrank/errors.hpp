#pragma once

#include <stdexcept>
#include <string>

namespace nnrank {

/// Base class for all domain errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes, terms or tensors whose dimensions do not agree.
class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A nonnegative context received a negative entry.
class NegativeEntry : public Error {
public:
    using Error::Error;
};

/// The tensor is not strictly inside the witness ball. This means "no
/// certificate", not "the rank differs from the slice bound".
class OutsideBall : public Error {
public:
    OutsideBall(double distance, double radius);

    double distance() const noexcept { return distance_; }
    double radius() const noexcept { return radius_; }

private:
    double distance_;
    double radius_;
};

/// Requested rank lies outside [generic rank, slice bound].
class RankOutOfRange : public Error {
public:
    RankOutOfRange(const std::string& what, long jacobian_cap);

    /// Best Jacobian rank observed (or -1 when the upper end was violated).
    long jacobian_cap() const noexcept { return cap_; }

private:
    long cap_;
};

class RetriesExhausted : public Error {
public:
    using Error::Error;
};

/// Malformed input file (JSON tensor, certificate, ...).
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace nnrank
