// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors

#include "rttloc/ap_solver.hpp"

#include "rttloc/geometry.hpp"
#include "rttloc/parallel.hpp"
#include "rttloc/ranging.hpp"
#include "rttloc/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>

namespace rttloc {
namespace {

std::vector<double> lattice(double lo, double hi, double step) {
    std::vector<double> out;
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    for (long long k = 0; k <= n; ++k)
        out.push_back(lo + static_cast<double>(k) * step);
    if (hi - out.back() > 1e-9)
        out.push_back(hi);
    return out;
}

// Structure-of-arrays view used in the hot loops. Summation runs in sample
// order, pairwise.
struct SampleArrays {
    std::vector<double> x, y, t;
    explicit SampleArrays(std::span<const RangingSample> samples) {
        x.reserve(samples.size());
        y.reserve(samples.size());
        t.reserve(samples.size());
        for (const auto& s : samples) {
            x.push_back(s.position.x);
            y.push_back(s.position.y);
            t.push_back(s.rtt_ns);
        }
    }
    std::size_t size() const { return t.size(); }

    double loss(double ax, double ay, double offset, std::vector<double>& buf) const {
        buf.resize(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double r =
                t[i] - (kRoundTripNsPerM * std::hypot(x[i] - ax, y[i] - ay) + offset);
            buf[i] = r * r;
        }
        return pairwise_sum(buf);
    }
};

struct Candidate {
    double loss;
    double x, y, offset;
    auto key() const { return std::tie(loss, x, y, offset); }
};

} // namespace

std::map<std::string, std::vector<RangingSample>> group_by_bssid(
    std::span<const RangingSample> samples) {
    std::map<std::string, std::vector<RangingSample>> groups;
    for (const auto& s : samples)
        groups[s.bssid].push_back(s);
    return groups;
}

ApSolveReport solve_ap(std::span<const RangingSample> samples, const Bounds& bounds,
                       const ApSolveConfig& config) {
    const std::string bssid = samples.empty() ? std::string{} : samples.front().bssid;
    if (samples.size() < config.min_samples || samples.empty())
        throw Error(ErrorCode::InsufficientData,
                    "bssid '" + bssid + "': " + std::to_string(samples.size()) +
                        " samples, need at least " + std::to_string(config.min_samples));
    if (!bounds.valid())
        throw Error(ErrorCode::InvalidArgument, "search bounds must have positive area");

    const SampleArrays arr(samples);
    const double n = static_cast<double>(arr.size());
    std::vector<double> buf;
    std::vector<double> u(arr.size());

    // Coarse lattice. For fixed (x, y) the loss in the offset c is
    // S + n (mean - c)^2, with S the centered sum of squares of
    // u_i = t_i - slope * d_i. Each node is scored at the offset lattice and
    // at the clamped mean, the exact minimizer over the offset interval; a
    // 250 ns lattice step alone is worth tens of meters of range and can push
    // every seed into the wrong basin.
    const auto xs = lattice(bounds.min_x, bounds.max_x, config.coarse_grid_m);
    const auto ys = lattice(bounds.min_y, bounds.max_y, config.coarse_grid_m);
    const auto cs = lattice(kMinOffsetNs, kMaxOffsetNs, config.offset_grid_ns);
    std::vector<Candidate> nodes;
    nodes.reserve(xs.size() * ys.size());
    buf.resize(arr.size());
    for (double gx : xs) {
        for (double gy : ys) {
            for (std::size_t i = 0; i < arr.size(); ++i)
                u[i] = arr.t[i] - kRoundTripNsPerM * std::hypot(arr.x[i] - gx, arr.y[i] - gy);
            const double mean = pairwise_sum(u) / n;
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const double d = u[i] - mean;
                buf[i] = d * d;
            }
            const double centered = pairwise_sum(buf);
            // Each lattice node keeps its best offset so that seeds are
            // distinct positions.
            Candidate best{std::numeric_limits<double>::infinity(), gx, gy, cs.front()};
            auto consider = [&](double c) {
                const Candidate cand{centered + n * (mean - c) * (mean - c), gx, gy, c};
                if (cand.key() < best.key())
                    best = cand;
            };
            for (double c : cs)
                consider(c);
            consider(std::clamp(mean, kMinOffsetNs, kMaxOffsetNs));
            nodes.push_back(best);
        }
    }
    const auto seeds =
        std::min<std::size_t>(nodes.size(), static_cast<std::size_t>(std::max(1, config.refine_seeds)));
    std::partial_sort(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(seeds), nodes.end(),
                      [](const Candidate& a, const Candidate& b) { return a.key() < b.key(); });

    SimplexOptions<3> opt;
    opt.lower = {bounds.min_x, bounds.min_y, kMinOffsetNs};
    opt.upper = {bounds.max_x, bounds.max_y, kMaxOffsetNs};
    opt.step = {config.coarse_grid_m, config.coarse_grid_m, config.offset_grid_ns};
    opt.max_iters = config.refine_max_iters;
    opt.rel_tol = config.refine_tol;

    auto objective = [&](const Vec<3>& p) { return arr.loss(p[0], p[1], p[2], buf); };

    Candidate best{std::numeric_limits<double>::infinity(), 0.0, 0.0, 0.0};
    Candidate best_seed = best;
    bool converged = false;
    for (std::size_t k = 0; k < seeds; ++k) {
        const Candidate& seed = nodes[k];
        const Candidate start{objective({seed.x, seed.y, seed.offset}), seed.x, seed.y, seed.offset};
        if (start.key() < best_seed.key())
            best_seed = start;
        const auto res = minimize_bounded<3>(objective, {seed.x, seed.y, seed.offset}, opt);
        const Candidate cand{res.value, res.point[0], res.point[1], res.point[2]};
        if (cand.key() < best.key()) {
            best = cand;
            converged = res.converged;
        }
    }

    ApSolveReport report;
    report.record.bssid = bssid;
    report.record.position = {best.x, best.y};
    report.record.offset_ns = best.offset;
    report.record.slope_ns_per_m = kRoundTripNsPerM;
    report.record.sample_count = arr.size();
    const RangingParams params{best.offset, kRoundTripNsPerM};
    report.loss_ns2 = sum_squared_loss(samples, report.record.position, params);
    report.coarse_loss_ns2 = sum_squared_loss(samples, {best_seed.x, best_seed.y},
                                              {best_seed.offset, kRoundTripNsPerM});
    report.record.residual_rms_ns = std::sqrt(report.loss_ns2 / n);
    std::vector<Position> pts;
    pts.reserve(samples.size());
    for (const auto& s : samples)
        pts.push_back(s.position);
    report.record.spread_m = point_set_diameter(pts);
    report.record.low_confidence = report.record.spread_m < config.min_spread_m;
    report.seeds_evaluated = seeds;
    report.converged = converged;
    return report;
}

double fit_slope(std::span<const RangingSample> samples, ApRecord& record) {
    std::vector<double> num;
    std::vector<double> den;
    num.reserve(samples.size());
    den.reserve(samples.size());
    double dmin = std::numeric_limits<double>::infinity();
    double dmax = -dmin;
    for (const auto& s : samples) {
        const double d = distance(s.position, record.position);
        num.push_back(d * (s.rtt_ns - record.offset_ns));
        den.push_back(d * d);
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    if (samples.size() < 2 || dmax - dmin <= 1e-9 * (1.0 + dmax) || dmax <= 0.0) {
        record.slope_ns_per_m = kRoundTripNsPerM;
        record.low_confidence = true;
        throw Error(ErrorCode::SlopeUnidentifiable,
                    "bssid '" + record.bssid + "': samples do not span distinct distances");
    }
    const double alpha = pairwise_sum(num) / pairwise_sum(den);
    record.slope_ns_per_m = std::clamp(alpha, kRoundTripNsPerM, 4.0 * kRoundTripNsPerM);
    return record.slope_ns_per_m;
}

ApBatchResult solve_all(std::span<const RangingSample> samples, const Bounds& bounds,
                        const ApSolveConfig& config, bool fit_slopes, unsigned jobs) {
    const auto groups = group_by_bssid(samples);
    std::vector<const std::pair<const std::string, std::vector<RangingSample>>*> items;
    for (const auto& g : groups)
        items.push_back(&g);

    struct Slot {
        std::optional<ApSolveReport> report;
        std::optional<ApIssue> issue;
    };
    std::vector<Slot> slots(items.size());
    parallel_for(items.size(), jobs, [&](std::size_t i) {
        const auto& [bssid, group] = *items[i];
        Slot& slot = slots[i];
        try {
            ApSolveReport rep = solve_ap(group, bounds, config);
            if (fit_slopes) {
                try {
                    fit_slope(group, rep.record);
                } catch (const Error& e) {
                    slot.issue = ApIssue{bssid, e.code(), e.what(), group.size()};
                }
            }
            slot.report = std::move(rep);
        } catch (const Error& e) {
            slot.issue = ApIssue{bssid, e.code(), e.what(), group.size()};
        }
    });

    ApBatchResult out;
    for (auto& s : slots) {
        if (s.report)
            out.reports.push_back(std::move(*s.report));
        if (s.issue)
            out.issues.push_back(std::move(*s.issue));
    }
    return out;
}

ApBatchResult fit_slopes(std::span<const RangingSample> samples, std::vector<ApRecord> records) {
    const auto groups = group_by_bssid(samples);
    std::sort(records.begin(), records.end(),
              [](const ApRecord& a, const ApRecord& b) { return a.bssid < b.bssid; });
    ApBatchResult out;
    for (auto& rec : records) {
        ApSolveReport rep;
        const auto it = groups.find(rec.bssid);
        if (it == groups.end()) {
            out.issues.push_back({rec.bssid, ErrorCode::InsufficientData,
                                  "bssid '" + rec.bssid + "': no samples to fit a slope", 0});
        } else {
            try {
                fit_slope(it->second, rec);
            } catch (const Error& e) {
                out.issues.push_back({rec.bssid, e.code(), e.what(), it->second.size()});
            }
            rep.loss_ns2 = sum_squared_loss(it->second, rec.position, params_of(rec));
        }
        rep.record = rec;
        out.reports.push_back(std::move(rep));
    }
    return out;
}

} // namespace rttloc
