// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors

#include "rttloc/ranging.hpp"

#include "rttloc/error.hpp"

#include <algorithm>
#include <vector>

namespace rttloc {

double tof_two_sided(const FtmTimestamps& ts) {
    if (!(ts.t4_ns > ts.t1_ns))
        throw Error(ErrorCode::InvalidTimestamps, "t4 must be later than t1");
    if (ts.t3_ns < ts.t2_ns)
        throw Error(ErrorCode::InvalidTimestamps, "responder send precedes responder receive");
    return (ts.t4_ns - ts.t1_ns) - (ts.t3_ns - ts.t2_ns);
}

double tof_one_sided(const FtmTimestamps& ts) {
    if (!(ts.t4_ns > ts.t1_ns))
        throw Error(ErrorCode::InvalidTimestamps, "t4 must be later than t1");
    return ts.t4_ns - ts.t1_ns;
}

double predict_rtt(double distance_m, const RangingParams& params) {
    if (distance_m < 0.0)
        throw Error(ErrorCode::InvalidArgument, "negative distance");
    return params.slope_ns_per_m * distance_m + params.offset_ns;
}

double invert_rtt(double rtt_ns, const RangingParams& params) {
    if (!(params.slope_ns_per_m > 0.0))
        throw Error(ErrorCode::InvalidArgument, "slope must be positive");
    return (rtt_ns - params.offset_ns) / params.slope_ns_per_m;
}

double residual(const RangingSample& sample, Position anchor, const RangingParams& params) {
    return sample.rtt_ns - predict_rtt(distance(sample.position, anchor), params);
}

double pairwise_sum(std::span<const double> values) {
    constexpr std::size_t kBlock = 16;
    if (values.size() <= kBlock) {
        double acc = 0.0;
        for (double v : values)
            acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double sum_squared_loss(std::span<const RangingSample> samples, Position anchor,
                        const RangingParams& params) {
    if (samples.empty())
        throw Error(ErrorCode::InvalidArgument, "loss over an empty sample set");
    std::vector<double> terms;
    terms.reserve(samples.size());
    for (const auto& s : samples) {
        const double r = residual(s, anchor, params);
        terms.push_back(r * r);
    }
    std::sort(terms.begin(), terms.end());
    return pairwise_sum(terms);
}

} // namespace rttloc
