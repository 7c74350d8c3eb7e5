#pragma once

#include <stdexcept>
#include <string>

namespace smx {

/// Base class of every error thrown by the solver.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Expansion point outside the potential's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Non-finite Taylor coefficient (pole, NaN from a user provider).
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Physically invalid model or solver parameters.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Singular edge-matching system of a slice (zero width, k = 0, v0 = 0).
class DegenerateSliceError : public Error {
public:
    using Error::Error;
};

/// Vanishing multiple-reflection denominator in a composition.
class ResonanceError : public Error {
public:
    using Error::Error;
};

/// Closure requested outside its validity range (step with E >= V1).
class InvalidClosureError : public Error {
public:
    using Error::Error;
};

/// Iteration cap hit: slice cap in a sweep or max_iter in refinement.
class NonConvergenceError : public Error {
public:
    using Error::Error;
};

/// Wavefunction reconstruction failed (singular matching, zero norm).
class ReconstructionError : public Error {
public:
    using Error::Error;
};

/// Result out of representable range.
class RangeError : public Error {
public:
    using Error::Error;
};

} // namespace smx
