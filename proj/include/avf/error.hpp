// Copyright (c) 2026 the avfchan authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace avf {

// Error categories map onto CLI exit codes: ConfigError -> 2,
// NumericError -> 3, IoError -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration, bad arguments, shape mismatches.
struct ConfigError : Error {
    using Error::Error;
};

// Shape/dimension violations; reported with the offending dims.
struct ShapeError : ConfigError {
    using ConfigError::ConfigError;
};

// Non-finite values where finite ones are required.
struct NumericError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace avf
