#pragma once

#include <stdexcept>
#include <string>

namespace catforge {

/// Raised for malformed or inconsistent run configurations (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an integrator invariant (norm, trace, positivity) is violated
/// beyond its abort threshold (CLI exit code 3).
class SolverAbort : public std::runtime_error {
public:
    SolverAbort(const std::string& what, std::string diagnostic)
        : std::runtime_error(what), diagnostic_(std::move(diagnostic)) {}

    const std::string& diagnostic() const { return diagnostic_; }

private:
    std::string diagnostic_;
};

/// Conditioning on a measurement outcome whose probability is numerically zero.
class UndefinedBranch : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace catforge
