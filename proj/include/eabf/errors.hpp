#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace eabf {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid or inconsistent configuration. `field()` names the offending key
/// as `section.key` when the error can be pinned to one.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// The slot recursion or a simulated cycle hit its slot cap before every
/// device completed.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& message, std::int64_t slots)
        : std::runtime_error(message), slots_(slots) {}

    std::int64_t slots() const noexcept { return slots_; }

private:
    std::int64_t slots_;
};

/// A simulated replication failed; carries the seed that reproduces it.
class SimulationError : public std::runtime_error {
public:
    SimulationError(const std::string& message, std::uint64_t seed)
        : std::runtime_error(message + " (seed " + std::to_string(seed) + ")"), seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

}  // namespace eabf
