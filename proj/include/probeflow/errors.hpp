#pragma once

#include <stdexcept>
#include <string>

namespace probeflow {

// Bad user input: config keys, file contents, metric/model names.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Aux/control results that cannot be matched up.
class PairingError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Filesystem failures (unreadable inputs, unwritable outputs).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Programming errors: shape mismatches between a probe and its inputs.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace probeflow
