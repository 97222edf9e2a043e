#pragma once

#include <stdexcept>
#include <string>

namespace tipcue {

/// Runtime failure inside the library (propagation, scheduling, I/O).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input: malformed files, out-of-range parameters, missing paths.
/// The CLI maps this to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace tipcue
