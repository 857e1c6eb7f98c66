// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rttloc {

enum class ErrorCode {
    InvalidArgument,
    InvalidTimestamps,
    InsufficientData,
    SlopeUnidentifiable,
    Underdetermined,
    GenerationError,
    ParseError,
    SchemaError,
    UnsupportedVersion,
    InvariantViolation,
    MergeError,
    UnknownPreset,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. Every failure carries a stable machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace rttloc
