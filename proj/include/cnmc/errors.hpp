#pragma once

#include <stdexcept>
#include <string>

namespace cnmc {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A quadrature or iteration failed to reach its tolerance. Carries the best
/// estimate obtained and an error bound for it.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, double estimate, double error_bound)
        : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

/// A profile is not strictly positive where it must be.
class PositivityViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BracketFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TransversalityFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NewtonDivergence : public std::runtime_error {
public:
    NewtonDivergence(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace cnmc
