#pragma once

#include <stdexcept>
#include <string>

namespace qotto {

/// Invalid configuration: bad key, value, or violated parameter invariant.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions do not match.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Imaginary normal-mode frequency at the requested detuning.
class StabilityError : public std::runtime_error {
public:
    StabilityError(const std::string& what, double delta)
        : std::runtime_error(what), delta_(delta) {}
    double delta() const noexcept { return delta_; }

private:
    double delta_;
};

/// Argument outside the domain of a function (time out of range, empty input).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Numerical failure inside a stochastic integrator.
class IntegratorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failure while writing results.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qotto
