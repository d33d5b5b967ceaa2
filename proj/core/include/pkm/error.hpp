#pragma once

#include <stdexcept>
#include <string>

namespace pkm {

/// Raised for malformed or inconsistent input data (CSV, schema, model files).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an instance or file does not conform to a fitted schema.
class SchemaMismatch : public DataError {
public:
    using DataError::DataError;
};

}  // namespace pkm
