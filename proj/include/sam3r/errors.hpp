#pragma once

#include <stdexcept>
#include <string>

namespace sam3r {

// Input/parse failures (CSV, JSON, cache files). CLI maps these to exit 2.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or missing configuration values (unmapped terrain class, invalid params).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A model is infeasible or a threshold is unreachable. CLI maps to exit 3.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

// A solver or oracle budget was exhausted. CLI maps to exit 4.
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sam3r
