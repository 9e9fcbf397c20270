#pragma once

#include <stdexcept>
#include <string>

namespace aoapos {

// Base for every numerical-domain failure (degenerate states, arcsin/arccos
// arguments out of range, hypergeometric poles). The CLI maps it to exit 3.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DegenerateStateError : public DomainError {
public:
    using DomainError::DomainError;
};

class StateConstructionError : public DomainError {
public:
    using DomainError::DomainError;
};

class EstimationDomainError : public DomainError {
public:
    using DomainError::DomainError;
};

class GeometryError : public DomainError {
public:
    using DomainError::DomainError;
};

// Normal matrix singular or too ill-conditioned to trust. Exit 4 in the CLI.
class RankError : public std::runtime_error {
public:
    RankError(const std::string& what, double condition)
        : std::runtime_error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

// Monte Carlo run whose solver failure fraction exceeded the allowed budget.
class ExperimentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace aoapos
