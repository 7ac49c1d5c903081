#pragma once

#include <stdexcept>
#include <string>

namespace sturmq {

// Base class for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input outside the documented domain (alpha not in (0,1), eps not in (0,1), ...).
struct DomainError : Error {
    using Error::Error;
};

// The continued fraction terminated before reaching the requested continuant
// (alpha is rational at the working precision). Callers resample or raise
// the precision.
struct InsufficientExpansion : Error {
    using Error::Error;
};

// A floor/ceiling boundary cannot be decided at the working precision.
struct PrecisionError : Error {
    using Error::Error;
};

// A word prefix is too short for the requested factor statistics.
struct PrefixTooShort : Error {
    using Error::Error;
};

// A Q-function denominator vanished at the evaluation point.
struct SingularEvaluation : Error {
    using Error::Error;
};

// A conditioning event has empty intersection with the lattice.
struct EmptyCondition : Error {
    using Error::Error;
};

// The computation was refused (non-decaying integrand, beta <= 1, ...).
struct Refused : Error {
    using Error::Error;
};

} // namespace sturmq
