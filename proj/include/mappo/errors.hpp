#pragma once

#include <stdexcept>
#include <string>

namespace mappo {

// Bad arguments or malformed records; CLI maps this to exit code 2.
struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Config file problems (unknown keys, bad values); exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values mid-computation; exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All sampled responses for a prompt were identical.
struct DegeneratePairError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mappo
