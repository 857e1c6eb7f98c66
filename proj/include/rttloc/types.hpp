// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors
//
// Shared domain types. Units: nanoseconds for time, meters for distance,
// dBm for signal strength. Positions live in a local Cartesian frame
// (x easting, y northing).

#pragma once

#include <cmath>
#include <cstddef>
#include <string>

namespace rttloc {

inline constexpr double kSpeedOfLight = 299'792'458.0;             // m/s
inline constexpr double kRoundTripNsPerM = 2.0 / kSpeedOfLight * 1e9; // ~6.6713 ns/m
inline constexpr double kDefaultClockHz = 240e6;
inline constexpr double kMinOffsetNs = 8000.0;
inline constexpr double kMaxOffsetNs = 12000.0;

struct Position {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

inline double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Axis-aligned rectangle in meters.
struct Bounds {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    bool valid() const;
    bool contains(Position p, double margin = 0.0) const;
    Position clamp(Position p) const;
    Bounds inflated(double margin) const;

    friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// One crowdsourced ranging observation: estimated client position, raw RTT,
/// RSSI of the ACK and the responding BSSID.
struct RangingSample {
    Position position;
    double rtt_ns = 0.0;
    double rssi_dbm = 0.0;
    std::string bssid;
    std::string trajectory_id;
    double time_s = 0.0;

    friend bool operator==(const RangingSample&, const RangingSample&) = default;
};

/// A solved anchor.
struct ApRecord {
    std::string bssid;
    Position position;
    double offset_ns = 10000.0;
    double slope_ns_per_m = kRoundTripNsPerM;
    std::size_t sample_count = 0;
    double residual_rms_ns = 0.0;
    double spread_m = 0.0;
    bool low_confidence = false;

    friend bool operator==(const ApRecord&, const ApRecord&) = default;
};

/// Throws InvariantViolation if the offset or slope is out of range.
void validate(const ApRecord& record);

/// Duration of one clock tick.
double tick_duration_ns(double clock_hz);

/// One-way distance covered by one RTT tick. `speed_of_light` is exposed so
/// the linear dependence can be tested.
double tick_distance_equiv_m(double clock_hz, double speed_of_light = kSpeedOfLight);

inline double round_trip_ns_to_m(double ns) { return ns / kRoundTripNsPerM; }
inline double m_to_round_trip_ns(double m) { return m * kRoundTripNsPerM; }

/// Lowercases and strips whitespace; used when BSSIDs come from files.
std::string canonical_bssid(std::string_view raw);

} // namespace rttloc
