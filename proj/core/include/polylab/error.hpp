#pragma once

#include <stdexcept>
#include <string>

namespace polylab {

// Base for every library failure. `kind` is a short machine tag such as
// "bracket-invalid" or "q-singular".
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

// Bad user input (maps to exit code 2 in the CLI).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Numerical failure (maps to exit code 3 in the CLI).
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace polylab
