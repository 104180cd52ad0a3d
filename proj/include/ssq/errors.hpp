#pragma once

#include <stdexcept>
#include <string>

namespace ssq {

/// Base class for all errors thrown by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid user input: bad flags, domain violations, malformed records.
/// Mapped to exit code 1 by the CLI.
struct input_error : error {
    using error::error;
};

/// Argument outside the mathematical domain of an operation.
struct domain_error : input_error {
    using input_error::input_error;
};

/// State vector fails the normalization invariant.
struct normalization_error : input_error {
    using input_error::input_error;
};

/// Squeezing parameter requested with mean_jz = 0.
struct undefined_xi_error : input_error {
    using input_error::input_error;
};

/// Exact-mode bound requested in a regime where the diagonalization curve
/// is not a valid lower bound (half-integer spin left of the bifurcation).
struct regime_error : input_error {
    using input_error::input_error;
};

/// Numerical failure: eigensolver non-convergence, step-size control failure,
/// root-find bracket failure. Mapped to exit code 2 by the CLI.
struct numerical_error : error {
    explicit numerical_error(const std::string& what, double achieved = 0.0)
        : error(what), achieved_accuracy(achieved) {}
    double achieved_accuracy;
};

} // namespace ssq
