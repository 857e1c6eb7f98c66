// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors

#include "rttloc/sim.hpp"

#include "rttloc/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <queue>
#include <random>

namespace rttloc {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string make_bssid(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "02:00:00:00:%02x:%02x", static_cast<unsigned>((index >> 8) & 0xff),
                  static_cast<unsigned>(index & 0xff));
    return buf;
}

// Layout helpers work in (u, v) = (long axis, short axis) coordinates.
struct Frame {
    Bounds b;
    bool u_is_x;
    double len() const { return u_is_x ? b.width() : b.height(); }
    double wid() const { return u_is_x ? b.height() : b.width(); }
    Position at(double u, double v) const {
        return u_is_x ? Position{b.min_x + u, b.min_y + v} : Position{b.min_x + v, b.min_y + u};
    }
};

// Adds a straight wall along the u axis (fixed v) or the v axis (fixed u),
// leaving door gaps centered at `gaps`.
void add_wall(std::vector<Wall>& walls, const Frame& f, bool along_u, double fixed, double from,
              double to, std::vector<double> gaps, double door, double att, double excess) {
    std::sort(gaps.begin(), gaps.end());
    double cursor = from;
    auto emit = [&](double s, double e) {
        if (e - s <= 1e-9)
            return;
        Segment seg = along_u ? Segment{f.at(s, fixed), f.at(e, fixed)}
                              : Segment{f.at(fixed, s), f.at(fixed, e)};
        walls.push_back({seg, att, excess});
    };
    for (double g : gaps) {
        const double gs = std::max(from, g - door / 2.0);
        const double ge = std::min(to, g + door / 2.0);
        emit(cursor, gs);
        cursor = std::max(cursor, ge);
    }
    emit(cursor, to);
}

struct Layout {
    std::vector<Wall> walls;
    std::vector<Position> entrances;
};

Layout build_layout(const WorldConfig& cfg, const Bounds& bounds) {
    const Frame f{bounds, cfg.length_m >= cfg.width_m};
    const double L = f.len();
    const double W = f.wid();
    const double door = cfg.door_width_m;
    const double cw = cfg.corridor_width_m;
    const bool corridor = cfg.interior_walls && W >= cw + 2.0 * door;

    // Cross walls split the long axis into rooms.
    std::vector<double> cuts{0.0};
    if (cfg.interior_walls && cfg.room_depth_m > 0.0)
        for (double u = cfg.room_depth_m; u < L - door; u += cfg.room_depth_m)
            cuts.push_back(u);
    cuts.push_back(L);
    std::vector<double> room_centers;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        room_centers.push_back(0.5 * (cuts[i] + cuts[i + 1]));

    const double mid_u = room_centers[room_centers.size() / 2];
    Layout out;
    out.entrances = {f.at(0.0, W / 2.0), f.at(L, W / 2.0), f.at(mid_u, 0.0)};

    const double ext_att = cfg.exterior_attenuation_db;
    const double exc = cfg.wall_excess_delay_ns;
    if (cfg.interior_walls) {
        add_wall(out.walls, f, true, 0.0, 0.0, L, {mid_u}, door, ext_att, exc);
        add_wall(out.walls, f, true, W, 0.0, L, {}, door, ext_att, exc);
        add_wall(out.walls, f, false, 0.0, 0.0, W, {W / 2.0}, door, ext_att, exc);
        add_wall(out.walls, f, false, L, 0.0, W, {W / 2.0}, door, ext_att, exc);
    }
    if (corridor) {
        const double lo = W / 2.0 - cw / 2.0;
        const double hi = W / 2.0 + cw / 2.0;
        add_wall(out.walls, f, true, lo, 0.0, L, room_centers, door, cfg.wall_attenuation_db, exc);
        add_wall(out.walls, f, true, hi, 0.0, L, room_centers, door, cfg.wall_attenuation_db, exc);
        for (std::size_t i = 1; i + 1 < cuts.size(); ++i) {
            add_wall(out.walls, f, false, cuts[i], 0.0, lo, {}, door, cfg.wall_attenuation_db, exc);
            add_wall(out.walls, f, false, cuts[i], hi, W, {}, door, cfg.wall_attenuation_db, exc);
        }
    } else if (cfg.interior_walls) {
        // Too narrow for a corridor: rooms in a row with doors on the center line.
        for (std::size_t i = 1; i + 1 < cuts.size(); ++i)
            add_wall(out.walls, f, false, cuts[i], 0.0, W, {W / 2.0}, door,
                     cfg.wall_attenuation_db, exc);
    }
    return out;
}

bool blocked(const std::vector<Wall>& walls, Position a, Position b) {
    const Segment s{a, b};
    return std::any_of(walls.begin(), walls.end(),
                       [&](const Wall& w) { return segments_intersect(s, w.segment); });
}

// 1 m walking grid over the interior.
struct WalkGrid {
    Bounds b;
    int nx = 0;
    int ny = 0;
    std::vector<std::vector<int>> adj;

    Position center(int cell) const {
        return {b.min_x + 0.5 + cell % nx, b.min_y + 0.5 + cell / nx};
    }
    int nearest(Position p) const {
        const int i = std::clamp(static_cast<int>(std::floor(p.x - b.min_x)), 0, nx - 1);
        const int j = std::clamp(static_cast<int>(std::floor(p.y - b.min_y)), 0, ny - 1);
        return j * nx + i;
    }
};

WalkGrid build_grid(const WorldSpec& world) {
    WalkGrid g;
    g.b = world.bounds;
    g.nx = std::max(1, static_cast<int>(std::floor(world.bounds.width())));
    g.ny = std::max(1, static_cast<int>(std::floor(world.bounds.height())));
    g.adj.assign(static_cast<std::size_t>(g.nx * g.ny), {});
    static constexpr int kDi[] = {1, 0, 1, -1};
    static constexpr int kDj[] = {0, 1, 1, 1};
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const int c = j * g.nx + i;
            for (int k = 0; k < 4; ++k) {
                const int ii = i + kDi[k];
                const int jj = j + kDj[k];
                if (ii < 0 || ii >= g.nx || jj < 0 || jj >= g.ny)
                    continue;
                const int d = jj * g.nx + ii;
                if (!blocked(world.walls, g.center(c), g.center(d))) {
                    g.adj[static_cast<std::size_t>(c)].push_back(d);
                    g.adj[static_cast<std::size_t>(d)].push_back(c);
                }
            }
        }
    }
    for (auto& a : g.adj)
        std::sort(a.begin(), a.end());
    return g;
}

// Breadth-first parents from `start`; -1 marks unreachable, start points to itself.
std::vector<int> bfs(const WalkGrid& g, int start) {
    std::vector<int> parent(g.adj.size(), -1);
    std::queue<int> q;
    parent[static_cast<std::size_t>(start)] = start;
    q.push(start);
    while (!q.empty()) {
        const int c = q.front();
        q.pop();
        for (int d : g.adj[static_cast<std::size_t>(c)]) {
            if (parent[static_cast<std::size_t>(d)] < 0) {
                parent[static_cast<std::size_t>(d)] = c;
                q.push(d);
            }
        }
    }
    return parent;
}

Position inward_normal(const Bounds& b, Position e) {
    const double dl = std::abs(e.x - b.min_x);
    const double dr = std::abs(e.x - b.max_x);
    const double db = std::abs(e.y - b.min_y);
    const double dt = std::abs(e.y - b.max_y);
    const double m = std::min({dl, dr, db, dt});
    if (m == dl) return {1.0, 0.0};
    if (m == dr) return {-1.0, 0.0};
    if (m == db) return {0.0, 1.0};
    return {0.0, -1.0};
}

Position lerp(Position a, Position b, double t) {
    return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t ordinal) {
    return splitmix64(seed ^ splitmix64(ordinal));
}

const std::vector<Preset>& presets() {
    static const std::vector<Preset> kPresets = {
        {"A", 94.17, 37.40, 9, 10, 11},
        {"B", 37.69, 74.78, 8, 9, 10},
        {"C", 26.12, 50.49, 8, 9, 6},
        {"D1", 30.24, 78.45, 9, 11, 10},
        {"D2", 30.24, 78.45, 7, 14, 15},
    };
    return kPresets;
}

const Preset& find_preset(std::string_view name) {
    for (const auto& p : presets())
        if (p.name == name)
            return p;
    std::string valid;
    for (const auto& p : presets())
        valid += (valid.empty() ? "" : ", ") + p.name;
    throw Error(ErrorCode::UnknownPreset,
                "unknown preset '" + std::string(name) + "'; valid presets: " + valid);
}

WorldConfig preset_config(std::string_view name, std::uint64_t seed) {
    const Preset& p = find_preset(name);
    WorldConfig cfg;
    cfg.name = p.name;
    cfg.length_m = p.length_m;
    cfg.width_m = p.width_m;
    cfg.ap_count = p.ap_count;
    cfg.seed = seed;
    return cfg;
}

void validate(const WorldSpec& world) {
    if (!world.bounds.valid())
        throw Error(ErrorCode::InvariantViolation, "world bounds must have positive area");
    for (std::size_t i = 0; i < world.aps.size(); ++i) {
        const auto& ap = world.aps[i];
        if (ap.bssid.empty())
            throw Error(ErrorCode::InvariantViolation, "AP with empty bssid");
        if (!world.bounds.contains(ap.position))
            throw Error(ErrorCode::InvariantViolation, "AP " + ap.bssid + " outside bounds");
        if (ap.offset_ns < kMinOffsetNs || ap.offset_ns > kMaxOffsetNs)
            throw Error(ErrorCode::InvariantViolation, "AP " + ap.bssid + " offset out of range");
        if (ap.nlos_slope_ns_per_m < kRoundTripNsPerM * (1.0 - 1e-12))
            throw Error(ErrorCode::InvariantViolation,
                        "AP " + ap.bssid + " slope below line-of-sight constant");
        for (std::size_t j = 0; j < i; ++j)
            if (world.aps[j].bssid == ap.bssid)
                throw Error(ErrorCode::InvariantViolation, "duplicate bssid " + ap.bssid);
    }
    for (const auto& e : world.entrances)
        if (!world.bounds.contains(e, 1e-9))
            throw Error(ErrorCode::InvariantViolation, "entrance outside bounds");
    const auto& m = world.measurement;
    if (!(m.rate_hz > 0.0) || !(m.noise_sigma_ns >= 0.0) || !(m.clock_hz > 0.0))
        throw Error(ErrorCode::InvariantViolation, "invalid measurement parameters");
    const auto& p = world.pdr;
    if (!(p.indoor_truncation_m > 0.0) || p.speed_m_s <= 0.0 || p.gps_sigma_m < 0.0 ||
        p.heading_drift_deg_per_sqrt_m < 0.0 || p.step_scale_sigma < 0.0 ||
        !(p.waypoint_rate_hz > 0.0))
        throw Error(ErrorCode::InvariantViolation, "invalid dead-reckoning parameters");
}

WorldSpec generate_world(const WorldConfig& cfg) {
    if (!(cfg.length_m > 0.0) || !(cfg.width_m > 0.0))
        throw Error(ErrorCode::InvalidArgument, "world dimensions must be positive");
    if (cfg.explicit_aps.empty() && cfg.ap_count < 1)
        throw Error(ErrorCode::InvalidArgument, "at least one AP is required");

    WorldSpec world;
    world.name = cfg.name;
    world.bounds = {0.0, 0.0, cfg.length_m, cfg.width_m};
    world.seed = cfg.seed;
    world.measurement = cfg.measurement;
    world.pdr = cfg.pdr;
    Layout layout = build_layout(cfg, world.bounds);
    world.walls = std::move(layout.walls);
    world.entrances = std::move(layout.entrances);

    auto separated = [&](Position p, const std::vector<TrueAp>& placed) {
        return std::all_of(placed.begin(), placed.end(), [&](const TrueAp& ap) {
            return distance(ap.position, p) >= cfg.min_ap_separation_m;
        });
    };

    std::mt19937_64 rng(derive_seed(cfg.seed, 0));
    if (!cfg.explicit_aps.empty()) {
        for (const auto& ap : cfg.explicit_aps) {
            if (!separated(ap.position, world.aps))
                throw Error(ErrorCode::GenerationError,
                            "AP " + ap.bssid + " violates the minimum separation");
            world.aps.push_back(ap);
        }
    } else {
        const double m = cfg.ap_edge_margin_m;
        std::uniform_real_distribution<double> ux(m, cfg.length_m - m);
        std::uniform_real_distribution<double> uy(m, cfg.width_m - m);
        std::uniform_real_distribution<double> uoff(cfg.offset_min_ns, cfg.offset_max_ns);
        std::uniform_real_distribution<double> uslope(cfg.nlos_slope_factor_min,
                                                      cfg.nlos_slope_factor_max);
        int retries = 0;
        while (world.aps.size() < cfg.ap_count) {
            const Position p{ux(rng), uy(rng)};
            if (!separated(p, world.aps)) {
                if (++retries > cfg.max_placement_retries)
                    throw Error(ErrorCode::GenerationError,
                                "cannot place " + std::to_string(cfg.ap_count) +
                                    " APs with the requested separation");
                continue;
            }
            TrueAp ap;
            ap.bssid = make_bssid(world.aps.size() + 1);
            ap.position = p;
            ap.offset_ns = uoff(rng);
            ap.nlos_slope_ns_per_m = kRoundTripNsPerM * uslope(rng);
            ap.tx_rssi_dbm_at_1m = cfg.tx_rssi_dbm_at_1m;
            world.aps.push_back(ap);
        }
    }
    std::sort(world.aps.begin(), world.aps.end(),
              [](const TrueAp& a, const TrueAp& b) { return a.bssid < b.bssid; });
    validate(world);
    return world;
}

Trajectory generate_trajectory(const WorldSpec& world, std::size_t entrance_index,
                               double duration_s, std::uint64_t seed) {
    if (entrance_index >= world.entrances.size())
        throw Error(ErrorCode::InvalidArgument,
                    "entrance index " + std::to_string(entrance_index) + " out of range");
    if (!(duration_s > 0.0))
        throw Error(ErrorCode::InvalidArgument, "trajectory duration must be positive");

    const PdrParams& pdr = world.pdr;
    std::mt19937_64 rng(derive_seed(seed, 1));
    const Position entrance = world.entrances[entrance_index];
    const Position n = inward_normal(world.bounds, entrance);
    const WalkGrid grid = build_grid(world);
    int cell = grid.nearest({entrance.x + 0.5 * n.x, entrance.y + 0.5 * n.y});

    // True path: straight approach from outside, then goal-point walks.
    std::vector<Position> path = {
        {entrance.x - pdr.outdoor_lead_m * n.x, entrance.y - pdr.outdoor_lead_m * n.y},
        entrance,
        grid.center(cell),
    };
    // Enough walking to cover the truncation distance even with scale bias.
    const double needed = pdr.outdoor_lead_m + 2.0 * pdr.indoor_truncation_m + 10.0;
    double walked = pdr.outdoor_lead_m + 1.0;
    while (walked < needed && walked < duration_s * pdr.speed_m_s) {
        const auto parent = bfs(grid, cell);
        std::vector<int> reachable;
        for (std::size_t c = 0; c < parent.size(); ++c)
            if (parent[c] >= 0 && static_cast<int>(c) != cell)
                reachable.push_back(static_cast<int>(c));
        if (reachable.empty())
            break;
        std::uniform_int_distribution<std::size_t> pick(0, reachable.size() - 1);
        const int goal = reachable[pick(rng)];
        std::vector<int> leg;
        for (int c = goal; c != cell; c = parent[static_cast<std::size_t>(c)])
            leg.push_back(c);
        for (auto it = leg.rbegin(); it != leg.rend(); ++it) {
            walked += distance(path.back(), grid.center(*it));
            path.push_back(grid.center(*it));
        }
        cell = goal;
    }

    // Resample at the waypoint rate and run the dead-reckoning error model.
    const double step = pdr.speed_m_s / pdr.waypoint_rate_hz;
    const double dt = 1.0 / pdr.waypoint_rate_hz;
    std::normal_distribution<double> unit(0.0, 1.0);
    const double scale_bias = pdr.step_scale_sigma > 0.0 ? pdr.step_scale_sigma * unit(rng) : 0.0;
    const double heading_sigma =
        pdr.heading_drift_deg_per_sqrt_m * std::numbers::pi / 180.0;

    Trajectory traj;
    traj.id = "traj-" + std::to_string(seed);
    Position err{0.0, 0.0};      // estimate - truth
    Position gps_err_sum{0.0, 0.0};
    std::size_t gps_fixes = 0;
    double heading_err = 0.0;
    double indoor_travel = 0.0;
    bool indoor = false;
    Position prev = path.front();

    auto emit = [&](Position truth) {
        Waypoint w;
        w.time_s = static_cast<double>(traj.waypoints.size()) * dt;
        w.truth = truth;
        const bool inside = world.bounds.contains(truth) && distance(truth, entrance) > 1e-9;
        if (!indoor && inside) {
            indoor = true;
            // Dead reckoning starts from the fused (averaged) outdoor fix.
            if (gps_fixes > 0)
                err = {gps_err_sum.x / gps_fixes, gps_err_sum.y / gps_fixes};
        }
        w.indoor = indoor;
        if (!indoor) {
            Position e{0.0, 0.0};
            if (pdr.gps_sigma_m > 0.0)
                e = {pdr.gps_sigma_m * unit(rng), pdr.gps_sigma_m * unit(rng)};
            gps_err_sum.x += e.x;
            gps_err_sum.y += e.y;
            ++gps_fixes;
            w.estimate = {truth.x + e.x, truth.y + e.y};
        } else {
            const double dx = truth.x - prev.x;
            const double dy = truth.y - prev.y;
            const double ds = std::hypot(dx, dy);
            if (heading_sigma > 0.0 && ds > 0.0)
                heading_err += heading_sigma * std::sqrt(ds) * unit(rng);
            const double c = std::cos(heading_err);
            const double s = std::sin(heading_err);
            const double k = 1.0 + scale_bias;
            err.x += k * (c * dx - s * dy) - dx;
            err.y += k * (s * dx + c * dy) - dy;
            indoor_travel += k * ds;
            w.estimate = {truth.x + err.x, truth.y + err.y};
        }
        prev = truth;
        traj.waypoints.push_back(w);
    };

    emit(path.front());
    double carry = 0.0;   // distance already walked into the current segment
    for (std::size_t i = 1; i < path.size(); ++i) {
        const Position a = path[i - 1];
        const Position b = path[i];
        const double len = distance(a, b);
        double at = step - carry;
        while (at <= len + 1e-12) {
            emit(lerp(a, b, len > 0.0 ? at / len : 1.0));
            if (indoor_travel > pdr.indoor_truncation_m ||
                traj.waypoints.back().time_s >= duration_s)
                return traj;
            at += step;
        }
        carry = len - (at - step);
    }
    return traj;
}

PathObservation observe_path(const WorldSpec& world, const TrueAp& ap, Position client) {
    const auto& m = world.measurement;
    PathObservation obs;
    obs.distance_m = distance(client, ap.position);
    double attenuation = 0.0;
    double excess = 0.0;
    const Segment link{client, ap.position};
    for (const auto& w : world.walls) {
        if (segments_intersect(link, w.segment)) {
            ++obs.wall_crossings;
            attenuation += w.attenuation_db;
            excess += w.excess_delay_ns;
        }
    }
    obs.rssi_dbm = ap.tx_rssi_dbm_at_1m -
                   10.0 * m.path_loss_exponent * std::log10(std::max(obs.distance_m, 1.0));
    if (m.wall_attenuation)
        obs.rssi_dbm -= attenuation;
    const double slope =
        (obs.wall_crossings > 0 && m.nlos_slope) ? ap.nlos_slope_ns_per_m : kRoundTripNsPerM;
    obs.rtt_ns = ap.offset_ns + slope * obs.distance_m + (m.wall_excess_delay ? excess : 0.0);
    return obs;
}

double quantize_rtt(double rtt_ns, double clock_hz) {
    const double tick = tick_duration_ns(clock_hz);
    return std::round(rtt_ns / tick) * tick;
}

std::vector<RangingSample> synthesize_samples(const WorldSpec& world, const Trajectory& traj,
                                              std::uint64_t seed) {
    std::vector<RangingSample> out;
    if (traj.waypoints.size() < 2 || world.aps.empty())
        return out;
    const auto& m = world.measurement;
    std::mt19937_64 rng(derive_seed(seed, 2));
    std::normal_distribution<double> noise(0.0, 1.0);
    const Bounds keep = world.bounds.inflated(m.sample_margin_m);

    const double t0 = traj.waypoints.front().time_s;
    const double t1 = traj.waypoints.back().time_s;
    std::size_t w = 0;
    for (auto k = static_cast<long long>(std::ceil(t0 * m.rate_hz));; ++k) {
        const double t = static_cast<double>(k) / m.rate_hz;
        if (t > t1)
            break;
        while (w + 2 < traj.waypoints.size() && traj.waypoints[w + 1].time_s <= t)
            ++w;
        const Waypoint& a = traj.waypoints[w];
        const Waypoint& b = traj.waypoints[w + 1];
        const double f = std::clamp((t - a.time_s) / (b.time_s - a.time_s), 0.0, 1.0);
        const Position truth = lerp(a.truth, b.truth, f);
        const Position estimate = lerp(a.estimate, b.estimate, f);
        if (!keep.contains(truth) || !keep.contains(estimate))
            continue;
        for (const auto& ap : world.aps) {
            const PathObservation obs = observe_path(world, ap, truth);
            if (obs.rssi_dbm < m.rssi_cutoff_dbm)
                continue;
            double rtt = obs.rtt_ns;
            if (m.noise_sigma_ns > 0.0)
                rtt += m.noise_sigma_ns * noise(rng);
            if (m.quantize)
                rtt = quantize_rtt(rtt, m.clock_hz);
            out.push_back({estimate, rtt, obs.rssi_dbm, ap.bssid, traj.id, t});
        }
    }
    return out;
}

std::vector<RangingSample> synthesize_snapshot(const WorldSpec& world, Position where,
                                               std::size_t count, std::uint64_t seed,
                                               const std::string& id) {
    const auto& m = world.measurement;
    std::vector<std::pair<const TrueAp*, PathObservation>> audible;
    for (const auto& ap : world.aps) {
        const PathObservation obs = observe_path(world, ap, where);
        if (obs.rssi_dbm >= m.rssi_cutoff_dbm)
            audible.emplace_back(&ap, obs);
    }
    std::vector<RangingSample> out;
    if (audible.empty())
        return out;
    std::mt19937_64 rng(derive_seed(seed, 3));
    std::normal_distribution<double> noise(0.0, 1.0);
    const double total_rate = m.rate_hz * static_cast<double>(audible.size());
    for (std::size_t i = 0; i < count; ++i) {
        const auto& [ap, obs] = audible[i % audible.size()];
        double rtt = obs.rtt_ns;
        if (m.noise_sigma_ns > 0.0)
            rtt += m.noise_sigma_ns * noise(rng);
        if (m.quantize)
            rtt = quantize_rtt(rtt, m.clock_hz);
        out.push_back({where, rtt, obs.rssi_dbm, ap->bssid, id,
                       static_cast<double>(i) / total_rate});
    }
    return out;
}

} // namespace rttloc
