// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors
//
// Ground-truth worlds, pedestrian trajectories with a GPS-to-dead-reckoning
// handover, and quantized noisy ranging samples.

#pragma once

#include "rttloc/geometry.hpp"
#include "rttloc/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rttloc {

/// Interior and exterior walls. Walkers never cross a wall; radio paths
/// pick up attenuation and excess delay per crossing.
struct Wall {
    Segment segment;
    double attenuation_db = 3.0;
    double excess_delay_ns = 2.0;
};

struct TrueAp {
    std::string bssid;
    Position position;
    double offset_ns = 10000.0;
    double nlos_slope_ns_per_m = kRoundTripNsPerM;
    double tx_rssi_dbm_at_1m = -20.0;
};

struct MeasurementParams {
    double rate_hz = 30.0;              // per in-range AP
    double rssi_cutoff_dbm = -60.0;
    double clock_hz = kDefaultClockHz;
    double noise_sigma_ns = 5.0;
    double path_loss_exponent = 2.5;
    bool wall_attenuation = true;       // subtract wall losses from RSSI
    bool nlos_slope = true;             // wall-crossed paths use the AP's NLOS slope
    bool wall_excess_delay = true;      // per-crossing excess delay
    bool quantize = true;               // round RTT to the nearest clock tick
    double sample_margin_m = 5.0;       // samples only within bounds inflated by this
};

struct PdrParams {
    double speed_m_s = 1.2;
    double heading_drift_deg_per_sqrt_m = 0.6;
    double step_scale_sigma = 0.01;     // per-trace relative step-length bias
    double gps_sigma_m = 1.5;
    double indoor_truncation_m = 70.0;
    double waypoint_rate_hz = 10.0;
    double outdoor_lead_m = 12.0;       // distance walked outside before the entrance
};

struct WorldSpec {
    std::string name;
    Bounds bounds;
    std::vector<Wall> walls;
    std::vector<TrueAp> aps;
    std::vector<Position> entrances;
    std::uint64_t seed = 0;
    MeasurementParams measurement;
    PdrParams pdr;
};

struct Waypoint {
    double time_s = 0.0;
    Position truth;
    Position estimate;
    bool indoor = false;
};

struct Trajectory {
    std::string id;
    std::vector<Waypoint> waypoints;
};

/// Inputs to generate_world. Leave `explicit_aps` empty for random placement.
struct WorldConfig {
    std::string name = "custom";
    double length_m = 30.0;             // along x
    double width_m = 30.0;              // along y
    std::size_t ap_count = 3;
    std::vector<TrueAp> explicit_aps;
    double min_ap_separation_m = 5.0;
    double ap_edge_margin_m = 1.0;
    bool interior_walls = true;
    double room_depth_m = 10.0;         // spacing of cross walls along the corridor
    double corridor_width_m = 3.0;
    double door_width_m = 2.0;
    double wall_attenuation_db = 3.0;
    double wall_excess_delay_ns = 2.0;
    double exterior_attenuation_db = 6.0;
    double offset_min_ns = kMinOffsetNs;
    double offset_max_ns = kMaxOffsetNs;
    double nlos_slope_factor_min = 1.08; // multiples of the LOS slope
    double nlos_slope_factor_max = 1.35;
    double tx_rssi_dbm_at_1m = -20.0;
    std::uint64_t seed = 1;
    int max_placement_retries = 10000;
    MeasurementParams measurement;
    PdrParams pdr;
};

struct Preset {
    std::string name;
    double length_m;
    double width_m;
    std::size_t ap_count;
    std::size_t trajectories;
    std::size_t test_points;
};

/// Floorplan presets A, B, C, D1, D2.
const std::vector<Preset>& presets();
const Preset& find_preset(std::string_view name);
WorldConfig preset_config(std::string_view name, std::uint64_t seed);

WorldSpec generate_world(const WorldConfig& config);

/// Throws InvariantViolation when the world is not self-consistent.
void validate(const WorldSpec& world);

Trajectory generate_trajectory(const WorldSpec& world, std::size_t entrance_index,
                               double duration_s, std::uint64_t seed);

std::vector<RangingSample> synthesize_samples(const WorldSpec& world, const Trajectory& traj,
                                              std::uint64_t seed);

/// Noise-free view of one client-AP link.
struct PathObservation {
    double distance_m = 0.0;
    int wall_crossings = 0;
    double rssi_dbm = 0.0;
    double rtt_ns = 0.0;   // before noise and quantization
};

PathObservation observe_path(const WorldSpec& world, const TrueAp& ap, Position client);

double quantize_rtt(double rtt_ns, double clock_hz);

/// Static-client snapshot: `count` measurements spread round-robin over the
/// APs audible at `where`. Samples carry `where` as position and `id` as
/// trajectory id.
std::vector<RangingSample> synthesize_snapshot(const WorldSpec& world, Position where,
                                               std::size_t count, std::uint64_t seed,
                                               const std::string& id);

/// Independent per-item seed: splitmix64(seed ^ splitmix64(ordinal)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t ordinal);

} // namespace rttloc
