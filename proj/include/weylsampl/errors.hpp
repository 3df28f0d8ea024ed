// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace weylsampl {

/// Validation failures: bad arguments, malformed inputs, guard violations.
/// The CLI maps these to exit code 1.
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Operation requested on a manifold kind that does not support it.
class UnsupportedModel : public InvalidInput {
public:
    explicit UnsupportedModel(const std::string& msg) : InvalidInput(msg) {}
};

/// A spectral query above the basis truncation threshold lambda_max.
class OutOfBand : public InvalidInput {
public:
    explicit OutOfBand(const std::string& msg) : InvalidInput(msg) {}
};

/// Truncated kernel sum whose tail certificate does not hold.
class TruncationUnsafe : public InvalidInput {
public:
    explicit TruncationUnsafe(const std::string& msg) : InvalidInput(msg) {}
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Numerical breakdowns: solver non-convergence, contract violations.
/// The CLI maps these (and subclasses) to exit code 2.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& msg) : std::runtime_error(msg) {}
};

/// Reconstruction requested from an operator without a positive lower frame bound.
class NotASamplingSet : public NumericalFailure {
public:
    NotASamplingSet(const std::string& msg, double sigma_min, int required_points)
        : NumericalFailure(msg), sigma_min_(sigma_min), required_points_(required_points) {}
    double sigma_min() const { return sigma_min_; }
    int required_points() const { return required_points_; }

private:
    double sigma_min_;
    int required_points_;
};

/// No admissible value found by a parameter search (e.g. the gamma bisection).
class SearchFailure : public NumericalFailure {
public:
    explicit SearchFailure(const std::string& msg) : NumericalFailure(msg) {}
};

/// Constant fit infeasible on the supplied data.
class FitFailure : public NumericalFailure {
public:
    explicit FitFailure(const std::string& msg) : NumericalFailure(msg) {}
};

} // namespace weylsampl
