// errors.hpp: exception types shared by the library and the CLI exit-code mapping

#pragma once

#include <stdexcept>
#include <string>

namespace dephasim {

// Invalid parameters or configuration (CLI exit 1).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Quadrature non-convergence, nonpositive traces where logs are taken (CLI exit 2).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File read/write failures (CLI exit 3).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dephasim
