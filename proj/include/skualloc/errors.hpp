#pragma once

#include <stdexcept>
#include <string>

namespace skualloc {

// Error categories map onto CLI exit codes: ConfigError -> 2,
// DataError -> 3, NumericError -> 4.

/// Invalid configuration or flag value; caught before any computation runs.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed, inconsistent, or insufficient input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine failed to converge or left its valid regime.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The continuous optimality equation has no interior root; the optimal
/// allocation is 0.
class NoInteriorSolutionError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace skualloc
