#pragma once

#include <stdexcept>
#include <string>

namespace splitsim {

// Invalid parameters, configuration, or usage. CLI maps this to exit code 2.
struct SpecError : std::runtime_error {
    explicit SpecError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable or malformed input data. CLI maps this to exit code 3.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace splitsim
