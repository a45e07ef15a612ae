#pragma once

#include <stdexcept>
#include <string>

namespace toric {

// Error taxonomy maps onto CLI exit codes: config 2, convergence 3, size limit 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ConvergenceError : Error {
    using Error::Error;
};

struct SizeLimitError : Error {
    using Error::Error;
};

} // namespace toric
