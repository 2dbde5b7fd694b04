#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace wptmod {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented invariant (non-positive length, bad key, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Quantity is mathematically undefined at the requested point
/// (zero field vector angle, steering pole).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Zero impedance, singular system matrix or log singularity.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Quadrature or refinement loop failed to meet its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Two-transmitter and single-coil solutions do not map onto each other.
class EquivalenceError : public Error {
public:
    using Error::Error;
};

/// Metal and coil training envelopes overlap too much to fit thresholds.
class NonSeparableError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline std::string describe(const char* what, const char* rule, double value) {
    std::ostringstream os;
    os << what << " must be " << rule << ", got " << value;
    return os.str();
}

inline void require_positive(double value, const char* what) {
    if (!(value > 0.0)) {
        throw ValidationError(describe(what, "> 0", value));
    }
}

inline void require_non_negative(double value, const char* what) {
    if (!(value >= 0.0)) {
        throw ValidationError(describe(what, ">= 0", value));
    }
}

} // namespace detail
} // namespace wptmod
