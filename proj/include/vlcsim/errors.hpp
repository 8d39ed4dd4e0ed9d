#pragma once

#include <stdexcept>
#include <string>

namespace vlcsim {

// Invalid numeric input to an operation (out-of-range wavelength, bad rho, ...).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Bad or inconsistent configuration (unknown policy, missing checkpoint, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Corrupt or incompatible serialized data (checkpoints, data tables).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem failures while reading or writing outputs.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace vlcsim
