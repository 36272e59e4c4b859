#pragma once

#include <stdexcept>
#include <string>

namespace dabsp {

/// Violated precondition or type invariant on a public operation.
struct ContractViolation : std::logic_error {
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Numerical failure (non-invertible innovation, failed factorization).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Scenario configuration problem, carries the offending field path.
struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string field_, const std::string& what)
        : std::runtime_error("config error at '" + field_ + "': " + what), field(std::move(field_)) {}
};

}  // namespace dabsp
