#pragma once

#include <stdexcept>
#include <string>

namespace adl {

// Invalid parameters or scenario input. The message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite values, blow-up past an a priori bound, or failure to converge.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Integer counts exceeding the 64-bit range.
class OverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace adl
