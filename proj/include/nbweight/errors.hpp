#pragma once

#include <stdexcept>
#include <string>

namespace nbweight {

// Malformed or inconsistent input: bad CSV cells, id mismatches, invalid
// configuration values. CLI maps this to exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure during computation (non-finite loss, overflow).
// CLI maps this to exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nbweight
