#pragma once

#include <stdexcept>
#include <string>

namespace adelheight {

// Invalid or degenerate input: maps to CLI exit code 2.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric failure (iteration budget exhausted, residuals too large): CLI exit code 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace adelheight
