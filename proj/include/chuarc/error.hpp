#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chuarc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter or configuration value violates its invariant. `field()` names
/// the offending field path (e.g. "reservoir.v_min").
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class InputDomainError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class LayoutError : public Error {
public:
    using Error::Error;
};

class NoSignalError : public Error {
public:
    using Error::Error;
};

class MetricError : public Error {
public:
    using Error::Error;
};

/// Non-finite state reached during integration.
class IntegrationError : public Error {
public:
    IntegrationError(std::size_t step, const std::string& what)
        : Error("integration failed at step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class GenerationError : public Error {
public:
    GenerationError(double retention_rate, const std::string& what)
        : Error(what), retention_rate_(retention_rate) {}
    double retention_rate() const noexcept { return retention_rate_; }

private:
    double retention_rate_;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace chuarc
