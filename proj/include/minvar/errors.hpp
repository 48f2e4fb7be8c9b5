#pragma once

#include <stdexcept>
#include <string>

namespace minvar {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (dimensions, ranges, non-finite values).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A solve or factorization required a positive definite matrix and did not get one.
class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

/// A denominator or normalizer collapsed below numerical resolution.
class NumericalBreakdown : public Error {
public:
    using Error::Error;
};

/// The interpolation system has no solution: the ones vector lies in the span of the returns.
class InfeasibleZvp : public Error {
public:
    using Error::Error;
};

/// The ones vector lies in the span of the supplied basis.
class InfeasibleProjection : public Error {
public:
    using Error::Error;
};

/// Estimated factor count leaves no residual space.
class DegenerateFactorCount : public Error {
public:
    using Error::Error;
};

/// Randomized construction could not reach a valid configuration.
class ConstructionFailed : public Error {
public:
    using Error::Error;
};

/// An iterative solver exhausted its iteration budget.
class SolverFailed : public Error {
public:
    using Error::Error;
};

/// A closed-form limit was requested outside its validity region.
class OutOfRegime : public Error {
public:
    using Error::Error;
};

/// An eligibility filter removed every asset.
class NoEligibleAssets : public Error {
public:
    using Error::Error;
};

/// A file could not be parsed; the message carries the offending line number.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace minvar
