// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors

#include "rttloc/client_solver.hpp"

#include "rttloc/error.hpp"
#include "rttloc/ranging.hpp"
#include "rttloc/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace rttloc {
namespace {

struct Term {
    const ApRecord* ap;
    double slope;
    double weight;
    double mean_rtt;
};

struct Prepared {
    std::vector<Term> terms;
    std::size_t unknown_bssids = 0;
    std::size_t unknown_measurements = 0;
};

Prepared prepare(const ClientSnapshot& snapshot, std::span<const ApRecord> ap_db,
                 bool fixed_slope) {
    std::map<std::string, const ApRecord*> db;
    for (const auto& r : ap_db)
        db.emplace(r.bssid, &r);
    std::map<std::string, std::vector<double>> by_bssid;
    for (const auto& m : snapshot.measurements)
        by_bssid[m.bssid].push_back(m.rtt_ns);

    Prepared out;
    for (auto& [bssid, values] : by_bssid) {
        const auto it = db.find(bssid);
        if (it == db.end()) {
            ++out.unknown_bssids;
            out.unknown_measurements += values.size();
            continue;
        }
        std::sort(values.begin(), values.end());
        const double mean = pairwise_sum(values) / static_cast<double>(values.size());
        const double slope = fixed_slope ? kRoundTripNsPerM : it->second->slope_ns_per_m;
        out.terms.push_back({it->second, slope, static_cast<double>(values.size()), mean});
    }
    return out;
}

double aggregated_loss(const std::vector<Term>& terms, double x, double y) {
    double acc = 0.0;
    for (const auto& t : terms) {
        const double d = std::hypot(x - t.ap->position.x, y - t.ap->position.y);
        const double r = t.mean_rtt - (t.slope * d + t.ap->offset_ns);
        acc += t.weight * r * r;
    }
    return acc;
}

std::vector<double> lattice(double lo, double hi, double step) {
    std::vector<double> out;
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    for (long long k = 0; k <= n; ++k)
        out.push_back(lo + static_cast<double>(k) * step);
    if (hi - out.back() > 1e-9)
        out.push_back(hi);
    return out;
}

ClientFix solve(const ClientSnapshot& snapshot, std::span<const ApRecord> ap_db,
                const Bounds& bounds, const ClientSolveConfig& config, bool fixed_slope) {
    if (config.min_distinct_aps < 3)
        throw Error(ErrorCode::InvalidArgument, "min_distinct_aps must be at least 3");
    if (!bounds.valid())
        throw Error(ErrorCode::InvalidArgument, "search bounds must have positive area");
    const Prepared prep = prepare(snapshot, ap_db, fixed_slope);
    if (prep.terms.size() < config.min_distinct_aps)
        throw Error(ErrorCode::Underdetermined,
                    "snapshot '" + snapshot.id + "' matches " + std::to_string(prep.terms.size()) +
                        " known APs, need at least " + std::to_string(config.min_distinct_aps));

    using Node = std::tuple<double, double, double>;   // loss, x, y
    std::vector<Node> nodes;
    for (double gx : lattice(bounds.min_x, bounds.max_x, config.coarse_grid_m))
        for (double gy : lattice(bounds.min_y, bounds.max_y, config.coarse_grid_m))
            nodes.emplace_back(aggregated_loss(prep.terms, gx, gy), gx, gy);
    const auto seeds = std::min<std::size_t>(
        nodes.size(), static_cast<std::size_t>(std::max(1, config.refine_seeds)));
    std::partial_sort(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(seeds),
                      nodes.end());

    SimplexOptions<2> opt;
    opt.lower = {bounds.min_x, bounds.min_y};
    opt.upper = {bounds.max_x, bounds.max_y};
    opt.step = {config.coarse_grid_m, config.coarse_grid_m};
    opt.max_iters = config.refine_max_iters;
    opt.rel_tol = config.refine_tol;
    auto objective = [&](const Vec<2>& p) { return aggregated_loss(prep.terms, p[0], p[1]); };

    Node best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    bool converged = false;
    for (std::size_t k = 0; k < seeds; ++k) {
        const auto& [l, sx, sy] = nodes[k];
        const auto res = minimize_bounded<2>(objective, {sx, sy}, opt);
        const Node cand{res.value, res.point[0], res.point[1]};
        if (cand < best) {
            best = cand;
            converged = res.converged;
        }
    }

    ClientFix fix;
    fix.position = {std::get<1>(best), std::get<2>(best)};
    fix.converged = converged;
    fix.matched_aps = prep.terms.size();
    fix.unknown_bssids = prep.unknown_bssids;
    fix.unknown_measurements = prep.unknown_measurements;
    for (const auto& t : prep.terms) {
        ApResidual r;
        r.bssid = t.ap->bssid;
        r.weight = static_cast<std::size_t>(t.weight);
        r.mean_rtt_ns = t.mean_rtt;
        r.distance_m = distance(fix.position, t.ap->position);
        r.slope_ns_per_m = t.slope;
        r.predicted_rtt_ns = t.slope * r.distance_m + t.ap->offset_ns;
        r.residual_ns = t.mean_rtt - r.predicted_rtt_ns;
        fix.residuals.push_back(std::move(r));
    }
    fix.loss_ns2 = snapshot_loss(snapshot, ap_db, fix.position, fixed_slope);
    return fix;
}

} // namespace

std::vector<ClientSnapshot> snapshots_from_samples(std::span<const RangingSample> samples) {
    std::vector<ClientSnapshot> out;
    for (const auto& s : samples) {
        if (out.empty() || out.back().id != s.trajectory_id) {
            out.push_back({s.trajectory_id, {}, s.position});
        }
        out.back().measurements.push_back({s.rtt_ns, s.rssi_dbm, s.bssid});
    }
    return out;
}

double snapshot_loss(const ClientSnapshot& snapshot, std::span<const ApRecord> ap_db,
                     Position where, bool fixed_slope) {
    std::map<std::string, const ApRecord*> db;
    for (const auto& r : ap_db)
        db.emplace(r.bssid, &r);
    std::vector<double> terms;
    for (const auto& m : snapshot.measurements) {
        const auto it = db.find(m.bssid);
        if (it == db.end())
            continue;
        const ApRecord& ap = *it->second;
        const RangingParams p{ap.offset_ns, fixed_slope ? kRoundTripNsPerM : ap.slope_ns_per_m};
        const double r = m.rtt_ns - predict_rtt(distance(where, ap.position), p);
        terms.push_back(r * r);
    }
    std::sort(terms.begin(), terms.end());
    return pairwise_sum(terms);
}

ClientFix localize(const ClientSnapshot& snapshot, std::span<const ApRecord> ap_db,
                   const Bounds& bounds, const ClientSolveConfig& config) {
    return solve(snapshot, ap_db, bounds, config, false);
}

ClientFix localize_fixed_slope(const ClientSnapshot& snapshot, std::span<const ApRecord> ap_db,
                               const Bounds& bounds, const ClientSolveConfig& config) {
    return solve(snapshot, ap_db, bounds, config, true);
}

} // namespace rttloc
