#pragma once

#include <stdexcept>
#include <string>

namespace lppl {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (CSV rows, dates, config files). Messages name the offending line.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally invalid data or arguments (duplicate timestamps, non-finite values, bad spans).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Fewer observations than an operation requires.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Model evaluated outside its domain (t >= tc).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Normal-equation matrix of the slaved linear fit is numerically singular.
/// The optimizer treats points raising this as infeasible.
class DegenerateBasisError : public Error {
public:
    using Error::Error;
};

/// Finite-difference Jacobian could not be formed (both perturbation sides infeasible).
class JacobianError : public Error {
public:
    using Error::Error;
};

/// Every point visited by the heuristic search was degenerate.
class SearchFailureError : public Error {
public:
    using Error::Error;
};

/// A local refinement (or a whole window fit) failed; message lists per-start causes.
class FitFailureError : public Error {
public:
    using Error::Error;
};

/// Inconsistent run configuration (empty window grid, bad probabilities, unknown keys).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Ensemble-level failure: no window produced a usable fit.
class EnsembleError : public Error {
public:
    using Error::Error;
};

} // namespace lppl
