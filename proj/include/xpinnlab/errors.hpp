#pragma once

#include <stdexcept>
#include <string>

namespace xpinnlab {

/// Error taxonomy. Every throw in the library uses one of these so callers
/// (and the CLI exit-code mapping) can tell configuration mistakes apart
/// from numerical failures.
struct InvalidInput : std::runtime_error {
    explicit InvalidInput(const std::string& m) : std::runtime_error(m) {}
};

struct ShapeError : InvalidInput {
    explicit ShapeError(const std::string& m) : InvalidInput(m) {}
};

struct ParseError : InvalidInput {
    explicit ParseError(const std::string& m) : InvalidInput(m) {}
};

struct ConfigError : InvalidInput {
    explicit ConfigError(const std::string& m) : InvalidInput(m) {}
};

struct DomainError : InvalidInput {
    explicit DomainError(const std::string& m) : InvalidInput(m) {}
};

struct UnsupportedError : InvalidInput {
    explicit UnsupportedError(const std::string& m) : InvalidInput(m) {}
};

/// Numerical failure at runtime (non-convergence, overflow, non-finite values).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& m) : std::runtime_error(m) {}
};

} // namespace xpinnlab
