#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace lingan {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dimension mismatches, out-of-range arguments, violated preconditions.
class InvalidInput : public Error {
public:
    using Error::Error;
};

// Matrix has an eigenvalue below the negative tolerance window.
class NotPsd : public Error {
public:
    using Error::Error;
};

// Size not supported by the construction (e.g. non power-of-two Hadamard).
class UnsupportedDimension : public Error {
public:
    using Error::Error;
};

// A computation left the regime where the result is meaningful
// (e.g. a squared distance far below zero).
class NumericalFailure : public Error {
public:
    using Error::Error;
};

// Covariance is singular where strict positive definiteness is required.
class SingularCovariance : public Error {
public:
    using Error::Error;
};

// Operand is degenerate for the requested operation (e.g. all-zero matrix
// where a pseudoinverse-based loss is undefined).
class DegenerateOperand : public Error {
public:
    using Error::Error;
};

// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

// Config file is malformed or contains unknown/invalid keys.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A trial inside a sweep failed; the message carries the trial coordinates.
class TrialError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidInput(msg);
}

inline void require_finite(const Eigen::Ref<const Matrix>& a, const char* what) {
    if (!a.allFinite()) throw InvalidInput(std::string(what) + ": entries must be finite");
}

} // namespace detail

} // namespace lingan
