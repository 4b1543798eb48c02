#pragma once

#include <stdexcept>
#include <string>

namespace rmsim {

/// Bad or incomplete configuration (maps to CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (maps to CLI exit code 3).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rmsim
