// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors
//
// Client localization against a database of solved anchors.

#pragma once

#include "rttloc/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rttloc {

struct Measurement {
    double rtt_ns = 0.0;
    double rssi_dbm = 0.0;   // carried, not used by the solver
    std::string bssid;
};

struct ClientSnapshot {
    std::string id;
    std::vector<Measurement> measurements;
    std::optional<Position> label;   // ground truth, evaluation only
};

struct ClientSolveConfig {
    std::size_t min_distinct_aps = 3;
    double coarse_grid_m = 1.0;
    int refine_seeds = 5;
    int refine_max_iters = 300;
    double refine_tol = 1e-10;
};

/// Per-AP term of the objective. Repeated measurements to one BSSID are
/// replaced by their mean with weight = count, which has the same minimizer
/// as summing over the raw measurements.
struct ApResidual {
    std::string bssid;
    std::size_t weight = 0;
    double mean_rtt_ns = 0.0;
    double predicted_rtt_ns = 0.0;
    double residual_ns = 0.0;
    double distance_m = 0.0;
    double slope_ns_per_m = 0.0;
};

struct ClientFix {
    Position position;
    double loss_ns2 = 0.0;                 // summed over raw matched measurements
    std::vector<ApResidual> residuals;     // sorted by bssid
    std::size_t matched_aps = 0;
    std::size_t unknown_bssids = 0;        // distinct BSSIDs missing from the database
    std::size_t unknown_measurements = 0;
    bool converged = false;
};

/// Groups consecutive samples by trajectory id into snapshots; the sample
/// position becomes the label.
std::vector<ClientSnapshot> snapshots_from_samples(std::span<const RangingSample> samples);

/// Throws Underdetermined when fewer than `min_distinct_aps` snapshot BSSIDs
/// are known to the database.
ClientFix localize(const ClientSnapshot& snapshot, std::span<const ApRecord> ap_db,
                   const Bounds& bounds, const ClientSolveConfig& config);

/// As localize, with every slope replaced by the line-of-sight constant.
ClientFix localize_fixed_slope(const ClientSnapshot& snapshot, std::span<const ApRecord> ap_db,
                               const Bounds& bounds, const ClientSolveConfig& config);

/// Squared RTT error at `where`, summed over raw measurements with known
/// BSSIDs.
double snapshot_loss(const ClientSnapshot& snapshot, std::span<const ApRecord> ap_db,
                     Position where, bool fixed_slope = false);

} // namespace rttloc
