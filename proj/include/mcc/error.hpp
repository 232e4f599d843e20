#pragma once

#include <stdexcept>
#include <string>

namespace mcc {

/// Malformed or inconsistent input data (files, matrices, ids).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid run configuration: tie-break policy, fraction, sensitivity configs.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mcc
