#pragma once

#include <stdexcept>
#include <string>

namespace bamc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad caller input: malformed images, empty absorb sets, out-of-range parameters.
struct InvalidInput : Error {
    using Error::Error;
};

// Image bytes that cannot be decoded.
struct DecodeError : Error {
    using Error::Error;
};

// Invalid pipeline configuration (file or flags).
struct ConfigError : Error {
    using Error::Error;
};

// The fundamental-matrix system is singular or did not reach tolerance;
// signals a transient component with no path to an absorbing state.
struct ChainNotAbsorbing : Error {
    using Error::Error;
};

// Foreground prior has no contrast; no node scores above the mean.
struct DegeneratePrior : Error {
    using Error::Error;
};

// The fusion system is singular (all unary weights zero).
struct OptimizerError : Error {
    using Error::Error;
};

// Broken internal invariant.
struct InternalError : Error {
    using Error::Error;
};

}  // namespace bamc
