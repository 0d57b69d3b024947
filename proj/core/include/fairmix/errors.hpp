#pragma once

#include <stdexcept>
#include <string>

namespace fairmix {

// Numeric breakdowns that are not the caller's fault: singular systems that
// survive jitter, likelihood collapse, diverging solutions.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Likelihood degenerated during an iterative fit; carries the iteration index.
class DegenerateFitError : public NumericError {
public:
    DegenerateFitError(const std::string& msg, int iteration)
        : NumericError(msg + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}
    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

// Coefficients diverged past the configured norm cap in an unpenalized
// logistic fit; classic symptom of a perfectly separated response.
class SeparationError : public NumericError {
public:
    explicit SeparationError(const std::string& msg) : NumericError(msg) {}
};

// Malformed input files or configuration: missing columns, bad cells,
// inconsistent roles, schema violations.
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// A metric has no value on this input (e.g. fewer than two usable groups).
class UndefinedMetricError : public std::runtime_error {
public:
    explicit UndefinedMetricError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested exact computation exceeds the configured enumeration budget.
class TooLargeError : public std::runtime_error {
public:
    explicit TooLargeError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fairmix
