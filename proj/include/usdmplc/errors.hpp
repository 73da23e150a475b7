#pragma once

#include <stdexcept>

namespace usdmplc {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Precondition violation (bad sizes, grids, parameter ranges).
struct InvalidArgument : Error {
    using Error::Error;
};

/// Requested branch/parameter combination admits no solution.
struct NoSolution : Error {
    using Error::Error;
};

/// Input set is rank-deficient where linear independence is required.
struct DegenerateInput : Error {
    using Error::Error;
};

/// State set violates the assumptions of the measurement construction.
struct ConstructionViolated : Error {
    using Error::Error;
};

/// Matrix row carries no usable probability mass.
struct UndefinedRow : Error {
    using Error::Error;
};

/// Filesystem or parsing failure.
struct IoError : Error {
    using Error::Error;
};

/// Numerical failure, e.g. non-convergence under strict mode.
struct NumericalFailure : Error {
    using Error::Error;
};

}  // namespace usdmplc
