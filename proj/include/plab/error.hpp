#pragma once

#include <stdexcept>
#include <string>

namespace plab {

/// Invalid input: wrong dimensions, malformed config, out-of-range parameters.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical invariant (norm, unitarity, hermiticity) was violated, or a
/// quantity is undefined at the requested point (singular block, zero norm).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace plab
