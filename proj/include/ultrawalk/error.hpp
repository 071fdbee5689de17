#pragma once

#include <stdexcept>
#include <string>

namespace ultrawalk {

// Invalid parameters or preconditions violated by the caller.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Singular matrices, failed Newton solves and similar numeric breakdowns.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// An open-boundary walk whose support has reached the edge of its array.
class LatticeError : public NumericError {
public:
    explicit LatticeError(const std::string& what) : NumericError(what) {}
};

} // namespace ultrawalk
