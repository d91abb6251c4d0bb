#pragma once

#include <stdexcept>
#include <string>

namespace repta {

// Root of every error raised by the toolkit. The CLI maps subclasses onto
// exit codes, so keep the hierarchy flat and descriptive.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Input data that parses but breaks a stated contract.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Tabular input missing required columns or with unparseable cells.
class SchemaError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class HorizonMismatchError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// A variable handle used with a model that did not create it.
class ModelMismatchError : public Error {
public:
    using Error::Error;
};

// Results that contradict each other (e.g. ledger identities broken).
class InconsistencyError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

// Bad configuration, missing files, unavailable solver backend.
class ConfigError : public Error {
public:
    using Error::Error;
};

// An optimization model proved infeasible. `family` names the constraint
// group whose removal restores feasibility, when one could be identified.
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, std::string family = {})
        : Error(what), family_(std::move(family)) {}
    const std::string& family() const { return family_; }

private:
    std::string family_;
};

// Solver stopped on a time or node limit without proving optimality.
class SolverLimitError : public Error {
public:
    using Error::Error;
};

}  // namespace repta
