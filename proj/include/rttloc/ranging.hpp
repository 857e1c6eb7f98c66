// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors

#pragma once

#include "rttloc/types.hpp"

#include <span>

namespace rttloc {

/// Raw FTM timestamps: initiator send, responder receive, responder send,
/// initiator receive.
struct FtmTimestamps {
    double t1_ns = 0.0;
    double t2_ns = 0.0;
    double t3_ns = 0.0;
    double t4_ns = 0.0;
};

/// Affine RTT-vs-distance model. The line-of-sight model has slope 2/c.
struct RangingParams {
    double offset_ns = 10000.0;
    double slope_ns_per_m = kRoundTripNsPerM;
};

inline RangingParams params_of(const ApRecord& r) { return {r.offset_ns, r.slope_ns_per_m}; }

/// Round trip with the responder dwell (t3 - t2) removed.
double tof_two_sided(const FtmTimestamps& ts);

/// Round trip including the responder dwell; only t1 and t4 are read.
double tof_one_sided(const FtmTimestamps& ts);

double predict_rtt(double distance_m, const RangingParams& params);

/// Inverse of predict_rtt.
double invert_rtt(double rtt_ns, const RangingParams& params);

double residual(const RangingSample& sample, Position anchor, const RangingParams& params);

/// Sum of squared residuals over `samples`. The squared terms are sorted and
/// pairwise summed, so the result does not depend on sample order.
double sum_squared_loss(std::span<const RangingSample> samples, Position anchor,
                        const RangingParams& params);

/// Recursive pairwise summation in the given order.
double pairwise_sum(std::span<const double> values);

} // namespace rttloc
