// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors
//
// Anchor bootstrapping. Each BSSID's position and processing offset are found
// by minimizing the squared RTT residual under the line-of-sight model, with
// the position confined to the building rectangle and the offset to
// [8, 12] us. A per-AP NLOS slope is fitted afterwards with position and
// offset held fixed.

#pragma once

#include "rttloc/error.hpp"
#include "rttloc/types.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace rttloc {

struct ApSolveConfig {
    double coarse_grid_m = 2.0;
    double offset_grid_ns = 250.0;
    int refine_seeds = 5;
    int refine_max_iters = 500;
    double refine_tol = 1e-10;
    std::size_t min_samples = 30;
    double min_spread_m = 5.0;
};

struct ApSolveReport {
    ApRecord record;
    double loss_ns2 = 0.0;
    double coarse_loss_ns2 = 0.0;   // best seed before refinement
    std::size_t seeds_evaluated = 0;
    bool converged = false;
};

/// A per-BSSID problem that did not stop the batch.
struct ApIssue {
    std::string bssid;
    ErrorCode code = ErrorCode::InsufficientData;
    std::string message;
    std::size_t sample_count = 0;
};

struct ApBatchResult {
    std::vector<ApSolveReport> reports;   // sorted by bssid
    std::vector<ApIssue> issues;          // sorted by bssid
};

/// Partition by BSSID. Input order is kept within each group.
std::map<std::string, std::vector<RangingSample>> group_by_bssid(
    std::span<const RangingSample> samples);

/// Solves one AP. All samples are assumed to share one BSSID.
/// Throws InsufficientData when fewer than `min_samples` are given.
ApSolveReport solve_ap(std::span<const RangingSample> samples, const Bounds& bounds,
                       const ApSolveConfig& config);

/// Least-squares slope through the fixed intercept `record.offset_ns`,
/// clamped to [2/c, 4 * 2/c] and stored in `record`. Throws
/// SlopeUnidentifiable (after resetting the record to the LOS slope and
/// marking it low-confidence) when all distances coincide.
double fit_slope(std::span<const RangingSample> samples, ApRecord& record);

ApBatchResult solve_all(std::span<const RangingSample> samples, const Bounds& bounds,
                        const ApSolveConfig& config, bool fit_slopes = true, unsigned jobs = 1);

/// Refits slopes of existing records from samples; records without samples
/// are left untouched.
ApBatchResult fit_slopes(std::span<const RangingSample> samples, std::vector<ApRecord> records);

} // namespace rttloc
