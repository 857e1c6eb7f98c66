// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors

#include "rttloc/types.hpp"

#include "rttloc/error.hpp"

#include <algorithm>
#include <cctype>

namespace rttloc {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::InvalidTimestamps: return "invalid-timestamps";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::SlopeUnidentifiable: return "slope-unidentifiable";
    case ErrorCode::Underdetermined: return "underdetermined";
    case ErrorCode::GenerationError: return "generation-error";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::SchemaError: return "schema-error";
    case ErrorCode::UnsupportedVersion: return "unsupported-version";
    case ErrorCode::InvariantViolation: return "invariant-violation";
    case ErrorCode::MergeError: return "merge-error";
    case ErrorCode::UnknownPreset: return "unknown-preset";
    case ErrorCode::IoError: return "io-error";
    }
    return "unknown";
}

bool Bounds::valid() const {
    return std::isfinite(min_x) && std::isfinite(min_y) && std::isfinite(max_x) &&
           std::isfinite(max_y) && max_x > min_x && max_y > min_y;
}

bool Bounds::contains(Position p, double margin) const {
    return p.x >= min_x - margin && p.x <= max_x + margin && p.y >= min_y - margin &&
           p.y <= max_y + margin;
}

Position Bounds::clamp(Position p) const {
    return {std::clamp(p.x, min_x, max_x), std::clamp(p.y, min_y, max_y)};
}

Bounds Bounds::inflated(double margin) const {
    return {min_x - margin, min_y - margin, max_x + margin, max_y + margin};
}

void validate(const ApRecord& record) {
    if (record.bssid.empty())
        throw Error(ErrorCode::InvariantViolation, "AP record with empty bssid");
    if (!(record.offset_ns >= kMinOffsetNs && record.offset_ns <= kMaxOffsetNs))
        throw Error(ErrorCode::InvariantViolation,
                    "AP " + record.bssid + ": offset " + std::to_string(record.offset_ns) +
                        " ns outside [8000, 12000]");
    // Slopes written by the fitter are clamped to exactly kRoundTripNsPerM; allow
    // for one rounding step through text serialization.
    if (!(record.slope_ns_per_m >= kRoundTripNsPerM * (1.0 - 1e-12)))
        throw Error(ErrorCode::InvariantViolation,
                    "AP " + record.bssid + ": slope below the line-of-sight constant");
    if (!std::isfinite(record.position.x) || !std::isfinite(record.position.y))
        throw Error(ErrorCode::InvariantViolation, "AP " + record.bssid + ": non-finite position");
}

double tick_duration_ns(double clock_hz) {
    if (!(clock_hz > 0.0) || !std::isfinite(clock_hz))
        throw Error(ErrorCode::InvalidArgument, "clock frequency must be positive");
    return 1e9 / clock_hz;
}

double tick_distance_equiv_m(double clock_hz, double speed_of_light) {
    if (!(speed_of_light > 0.0))
        throw Error(ErrorCode::InvalidArgument, "speed of light must be positive");
    return tick_duration_ns(clock_hz) * 1e-9 * speed_of_light / 2.0;
}

std::string canonical_bssid(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char ch : raw) {
        if (std::isspace(static_cast<unsigned char>(ch)))
            continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return out;
}

} // namespace rttloc
