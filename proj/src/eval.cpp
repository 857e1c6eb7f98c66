// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors

#include "rttloc/eval.hpp"

#include "rttloc/error.hpp"
#include "rttloc/parallel.hpp"
#include "rttloc/ranging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace rttloc {
namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string padded(const char* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s-%03zu", prefix, i);
    return buf;
}

void write_cdf(const std::filesystem::path& path, const std::optional<ErrorStats>& stats) {
    std::string text = "error_m,fraction\n";
    if (stats)
        for (const auto& p : stats->cdf)
            text += fmt(p.error_m) + "," + fmt(p.fraction) + "\n";
    write_text_file(path, text);
}

std::optional<ErrorStats> maybe_stats(const std::vector<double>& errors) {
    if (errors.empty())
        return std::nullopt;
    return compute_stats(errors);
}

Json optional_stats(const std::optional<ErrorStats>& s) {
    return s ? stats_to_json(*s) : Json(nullptr);
}

} // namespace

ErrorStats compute_stats(std::span<const double> errors) {
    if (errors.empty())
        throw Error(ErrorCode::InvalidArgument, "statistics of an empty error list");
    std::vector<double> sorted(errors.begin(), errors.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    const double dn = static_cast<double>(n);

    ErrorStats s;
    s.count = n;
    s.mean_m = pairwise_sum(sorted) / dn;
    std::vector<double> dev;
    dev.reserve(n);
    for (double e : sorted)
        dev.push_back((e - s.mean_m) * (e - s.mean_m));
    s.std_m = std::sqrt(pairwise_sum(dev) / dn);
    s.median_m = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    for (std::size_t i = 0; i < n; ++i) {
        if (i + 1 < n && sorted[i + 1] == sorted[i])
            continue;
        s.cdf.push_back({sorted[i], static_cast<double>(i + 1) / dn});
    }
    return s;
}

double mean_from_cdf(std::span<const CdfPoint> cdf) {
    double acc = 0.0;
    double prev = 0.0;
    for (const auto& p : cdf) {
        acc += p.error_m * (p.fraction - prev);
        prev = p.fraction;
    }
    return acc;
}

double median_from_cdf(std::span<const CdfPoint> cdf) {
    for (std::size_t k = 0; k < cdf.size(); ++k) {
        if (cdf[k].fraction >= 0.5) {
            if (cdf[k].fraction == 0.5 && k + 1 < cdf.size())
                return 0.5 * (cdf[k].error_m + cdf[k + 1].error_m);
            return cdf[k].error_m;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "empty CDF");
}

SimulatedTraces simulate_traces(const WorldSpec& world, std::size_t count, std::uint64_t seed,
                                double duration_s, unsigned jobs) {
    if (world.entrances.empty())
        throw Error(ErrorCode::InvalidArgument, "world has no entrances");
    std::vector<Trajectory> trajs(count);
    std::vector<std::vector<RangingSample>> per(count);
    parallel_for(count, jobs, [&](std::size_t k) {
        Trajectory t = generate_trajectory(world, k % world.entrances.size(), duration_s,
                                           derive_seed(seed, 100 + k));
        t.id = padded("traj", k);
        per[k] = synthesize_samples(world, t, derive_seed(seed, 200 + k));
        trajs[k] = std::move(t);
    });
    SimulatedTraces out;
    out.trajectories = std::move(trajs);
    for (auto& p : per)
        out.samples.insert(out.samples.end(), p.begin(), p.end());
    return out;
}

std::vector<Position> test_grid(const Bounds& bounds, double spacing_m, double inset_m) {
    if (!(spacing_m > 0.0))
        throw Error(ErrorCode::InvalidArgument, "test grid spacing must be positive");
    const Bounds inner = bounds.inflated(-inset_m);
    if (!inner.valid())
        return {};
    // Centered grid: equal leftover margins on both sides.
    auto axis = [&](double lo, double hi) {
        const auto n = static_cast<std::size_t>(std::floor((hi - lo) / spacing_m)) + 1;
        const double start = lo + 0.5 * ((hi - lo) - static_cast<double>(n - 1) * spacing_m);
        std::vector<double> v;
        for (std::size_t i = 0; i < n; ++i)
            v.push_back(start + static_cast<double>(i) * spacing_m);
        return v;
    };
    std::vector<Position> pts;
    for (double y : axis(inner.min_y, inner.max_y))
        for (double x : axis(inner.min_x, inner.max_x))
            pts.push_back({x, y});
    return pts;
}

std::vector<RangingSample> synthesize_test_snapshots(const WorldSpec& world,
                                                     std::span<const Position> points,
                                                     std::size_t count, std::uint64_t seed) {
    std::vector<RangingSample> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::string id = padded("tp", i);
        auto snap = synthesize_snapshot(world, points[i], count, derive_seed(seed, 300 + i), id);
        // Silent points yield no samples; run_experiment lists them as discarded.
        out.insert(out.end(), snap.begin(), snap.end());
    }
    return out;
}

ApDatabase make_database(const ApBatchResult& batch, const std::string& building_id,
                         const std::string& batch_id, std::span<const RangingSample> samples) {
    ApDatabase db;
    db.building_id = building_id;
    for (const auto& r : batch.reports)
        db.records.emplace(r.record.bssid, r.record);
    double latest = 0.0;
    for (const auto& s : samples)
        latest = std::max(latest, s.time_s);
    db.provenance.push_back({batch_id, samples.size(), latest});
    return db;
}

ExperimentReport evaluate(const WorldSpec& world, const ApDatabase& db,
                          std::span<const ClientSnapshot> snapshots,
                          const ClientSolveConfig& client, bool ablation, unsigned jobs) {
    ExperimentReport rep;
    rep.world_name = world.name;
    rep.seed = world.seed;

    std::map<std::string, const TrueAp*> truth;
    for (const auto& ap : world.aps)
        truth.emplace(ap.bssid, &ap);
    std::vector<double> ap_errors;
    for (const auto& [bssid, rec] : db.records) {
        const auto it = truth.find(bssid);
        if (it == truth.end())
            continue;
        ApEval e;
        e.bssid = bssid;
        e.truth = it->second->position;
        e.estimate = rec.position;
        e.error_m = distance(e.truth, e.estimate);
        e.true_offset_ns = it->second->offset_ns;
        e.offset_ns = rec.offset_ns;
        e.true_slope_ns_per_m = it->second->nlos_slope_ns_per_m;
        e.slope_ns_per_m = rec.slope_ns_per_m;
        e.sample_count = rec.sample_count;
        e.low_confidence = rec.low_confidence;
        ap_errors.push_back(e.error_m);
        rep.aps.push_back(e);
    }
    rep.ap_stats = maybe_stats(ap_errors);

    const auto records = db.record_list();
    struct Slot {
        std::optional<TestPointEval> point;
        std::optional<DiscardedPoint> discarded;
    };
    std::vector<Slot> slots(snapshots.size());
    parallel_for(snapshots.size(), jobs, [&](std::size_t i) {
        const ClientSnapshot& snap = snapshots[i];
        try {
            const ClientFix fix = localize(snap, records, world.bounds, client);
            TestPointEval p;
            p.id = snap.id;
            p.truth = snap.label.value_or(Position{});
            p.estimate = fix.position;
            p.error_m = distance(p.truth, p.estimate);
            p.matched_aps = fix.matched_aps;
            p.measurements = snap.measurements.size();
            for (const auto& r : fix.residuals) {
                const auto it = truth.find(r.bssid);
                if (it != truth.end() &&
                    observe_path(world, *it->second, p.truth).wall_crossings >= 2)
                    ++p.nlos_paths;
            }
            if (ablation) {
                const ClientFix fixed = localize_fixed_slope(snap, records, world.bounds, client);
                p.fixed_slope_estimate = fixed.position;
                p.fixed_slope_error_m = distance(p.truth, fixed.position);
            }
            slots[i].point = p;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Underdetermined)
                throw;
            std::size_t matched = 0;
            std::map<std::string, int> seen;
            for (const auto& m : snap.measurements)
                if (db.records.count(m.bssid) && seen[m.bssid]++ == 0)
                    ++matched;
            slots[i].discarded = DiscardedPoint{snap.id, snap.label, matched, e.what()};
        }
    });

    std::vector<double> errs;
    std::vector<double> fixed_errs;
    std::size_t links = 0;
    std::size_t nlos = 0;
    for (auto& s : slots) {
        if (s.point) {
            errs.push_back(s.point->error_m);
            if (s.point->fixed_slope_error_m)
                fixed_errs.push_back(*s.point->fixed_slope_error_m);
            links += s.point->matched_aps;
            nlos += s.point->nlos_paths;
            rep.points.push_back(std::move(*s.point));
        }
        if (s.discarded)
            rep.discarded.push_back(std::move(*s.discarded));
    }
    rep.client_stats = maybe_stats(errs);
    rep.client_fixed_slope_stats = maybe_stats(fixed_errs);
    rep.nlos_path_fraction = links ? static_cast<double>(nlos) / static_cast<double>(links) : 0.0;
    return rep;
}

ExperimentReport run_experiment(const WorldSpec& world, const ExperimentConfig& config) {
    const SimulatedTraces traces = simulate_traces(world, config.trajectories, config.seed,
                                                   config.trajectory_duration_s, config.jobs);
    const ApBatchResult batch =
        solve_all(traces.samples, world.bounds, config.ap, true, config.jobs);
    const ApDatabase db = make_database(batch, world.name, "sim-" + std::to_string(config.seed),
                                        traces.samples);

    const std::vector<Position> points = config.test_points.empty()
                                             ? test_grid(world.bounds, config.test_grid_m,
                                                         config.test_inset_m)
                                             : config.test_points;
    const auto snap_samples =
        synthesize_test_snapshots(world, points, config.snapshot_measurements, config.seed);
    std::vector<ClientSnapshot> snapshots = snapshots_from_samples(snap_samples);

    ExperimentReport rep = evaluate(world, db, snapshots, config.client, config.ablation, config.jobs);
    // Points with no audible AP produce no snapshot at all.
    std::map<std::string, bool> present;
    for (const auto& s : snapshots)
        present[s.id] = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::string id = padded("tp", i);
        if (!present.count(id))
            rep.discarded.push_back({id, points[i], 0, "no audible AP"});
    }
    std::sort(rep.discarded.begin(), rep.discarded.end(),
              [](const DiscardedPoint& a, const DiscardedPoint& b) { return a.id < b.id; });
    rep.seed = config.seed;
    rep.trajectories = traces.trajectories.size();
    rep.samples = traces.samples.size();
    rep.ap_issues = batch.issues;
    return rep;
}

Json stats_to_json(const ErrorStats& s) {
    Json j;
    j["mean_m"] = s.mean_m;
    j["median_m"] = s.median_m;
    j["std_m"] = s.std_m;
    j["count"] = s.count;
    return j;
}

Json report_to_json(const ExperimentReport& r) {
    Json j;
    j["world"] = r.world_name;
    j["seed"] = r.seed;
    j["trajectories"] = r.trajectories;
    j["samples"] = r.samples;
    j["conventions"] = Json{{"std", "population"},
                            {"median", "mean of the two middle values for even counts"},
                            {"min_matched_aps", "test points with fewer matched APs are discarded"}};
    j["ap_stats"] = optional_stats(r.ap_stats);
    j["client_stats"] = optional_stats(r.client_stats);
    j["client_fixed_slope_stats"] = optional_stats(r.client_fixed_slope_stats);
    j["nlos_path_fraction"] = r.nlos_path_fraction;
    j["aps"] = Json::array();
    for (const auto& a : r.aps)
        j["aps"].push_back(Json{{"bssid", a.bssid},
                                {"true_x_m", a.truth.x},
                                {"true_y_m", a.truth.y},
                                {"x_m", a.estimate.x},
                                {"y_m", a.estimate.y},
                                {"error_m", a.error_m},
                                {"true_offset_ns", a.true_offset_ns},
                                {"offset_ns", a.offset_ns},
                                {"true_slope_ns_per_m", a.true_slope_ns_per_m},
                                {"slope_ns_per_m", a.slope_ns_per_m},
                                {"sample_count", a.sample_count},
                                {"low_confidence", a.low_confidence}});
    j["ap_issues"] = Json::array();
    for (const auto& i : r.ap_issues)
        j["ap_issues"].push_back(Json{{"bssid", i.bssid},
                                      {"code", std::string(to_string(i.code))},
                                      {"message", i.message},
                                      {"sample_count", i.sample_count}});
    j["test_points"] = Json::array();
    for (const auto& p : r.points) {
        Json pj{{"id", p.id},
                {"true_x_m", p.truth.x},
                {"true_y_m", p.truth.y},
                {"x_m", p.estimate.x},
                {"y_m", p.estimate.y},
                {"error_m", p.error_m},
                {"matched_aps", p.matched_aps},
                {"nlos_paths", p.nlos_paths},
                {"measurements", p.measurements}};
        if (p.fixed_slope_estimate) {
            pj["fixed_slope_x_m"] = p.fixed_slope_estimate->x;
            pj["fixed_slope_y_m"] = p.fixed_slope_estimate->y;
            pj["fixed_slope_error_m"] = *p.fixed_slope_error_m;
        }
        j["test_points"].push_back(pj);
    }
    j["discarded"] = Json::array();
    for (const auto& d : r.discarded) {
        Json dj{{"id", d.id}, {"matched_aps", d.matched_aps}, {"reason", d.reason}};
        if (d.truth) {
            dj["true_x_m"] = d.truth->x;
            dj["true_y_m"] = d.truth->y;
        }
        j["discarded"].push_back(dj);
    }
    return j;
}

void write_report(const std::filesystem::path& dir, const ExperimentReport& r) {
    std::filesystem::create_directories(dir);
    write_text_file(dir / "report.json", report_to_json(r).dump(2) + "\n");

    std::string ap = "bssid,true_x_m,true_y_m,x_m,y_m,error_m,true_offset_ns,offset_ns,slope_ns_per_m\n";
    for (const auto& a : r.aps)
        ap += a.bssid + "," + fmt(a.truth.x) + "," + fmt(a.truth.y) + "," + fmt(a.estimate.x) + "," +
              fmt(a.estimate.y) + "," + fmt(a.error_m) + "," + fmt(a.true_offset_ns) + "," +
              fmt(a.offset_ns) + "," + fmt(a.slope_ns_per_m) + "\n";
    write_text_file(dir / "ap_errors.csv", ap);

    std::string cl = "id,true_x_m,true_y_m,x_m,y_m,error_m,fixed_slope_error_m,matched_aps\n";
    for (const auto& p : r.points)
        cl += p.id + "," + fmt(p.truth.x) + "," + fmt(p.truth.y) + "," + fmt(p.estimate.x) + "," +
              fmt(p.estimate.y) + "," + fmt(p.error_m) + "," +
              (p.fixed_slope_error_m ? fmt(*p.fixed_slope_error_m) : std::string{}) + "," +
              std::to_string(p.matched_aps) + "\n";
    write_text_file(dir / "client_errors.csv", cl);

    write_cdf(dir / "cdf_ap.csv", r.ap_stats);
    write_cdf(dir / "cdf_client.csv", r.client_stats);
    if (r.client_fixed_slope_stats)
        write_cdf(dir / "cdf_client_fixed_slope.csv", r.client_fixed_slope_stats);
}

std::vector<SuiteRow> run_suite(std::span<const std::string> preset_names,
                                std::span<const std::uint64_t> seeds,
                                const ExperimentConfig& config) {
    std::vector<SuiteRow> rows;
    for (const auto& name : preset_names) {
        const Preset& preset = find_preset(name);
        SuiteRow row;
        row.preset = name;
        row.seeds = seeds.size();
        std::vector<double> ap_errs, cl_errs, fx_errs;
        for (std::uint64_t seed : seeds) {
            ExperimentConfig cfg = config;
            cfg.seed = seed;
            if (cfg.trajectories == 0)
                cfg.trajectories = preset.trajectories;
            const WorldSpec world = generate_world(preset_config(name, seed));
            const ExperimentReport rep = run_experiment(world, cfg);
            row.aps_solved += rep.aps.size();
            row.points_evaluated += rep.points.size();
            row.points_discarded += rep.discarded.size();
            for (const auto& a : rep.aps)
                ap_errs.push_back(a.error_m);
            for (const auto& p : rep.points) {
                cl_errs.push_back(p.error_m);
                if (p.fixed_slope_error_m)
                    fx_errs.push_back(*p.fixed_slope_error_m);
            }
        }
        row.ap_stats = maybe_stats(ap_errs);
        row.client_stats = maybe_stats(cl_errs);
        row.client_fixed_slope_stats = maybe_stats(fx_errs);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_suite(const std::filesystem::path& dir, std::span<const SuiteRow> rows) {
    std::filesystem::create_directories(dir);
    Json j = Json::array();
    std::string csv =
        "preset,seeds,aps_solved,points_evaluated,points_discarded,ap_median_m,client_mean_m,"
        "client_median_m,client_std_m,fixed_slope_mean_m\n";
    auto val = [](const std::optional<ErrorStats>& s, double ErrorStats::*f) {
        return s ? fmt((*s).*f) : std::string{};
    };
    for (const auto& r : rows) {
        j.push_back(Json{{"preset", r.preset},
                         {"seeds", r.seeds},
                         {"aps_solved", r.aps_solved},
                         {"points_evaluated", r.points_evaluated},
                         {"points_discarded", r.points_discarded},
                         {"ap_stats", optional_stats(r.ap_stats)},
                         {"client_stats", optional_stats(r.client_stats)},
                         {"client_fixed_slope_stats", optional_stats(r.client_fixed_slope_stats)}});
        csv += r.preset + "," + std::to_string(r.seeds) + "," + std::to_string(r.aps_solved) + "," +
               std::to_string(r.points_evaluated) + "," + std::to_string(r.points_discarded) + "," +
               val(r.ap_stats, &ErrorStats::median_m) + "," + val(r.client_stats, &ErrorStats::mean_m) +
               "," + val(r.client_stats, &ErrorStats::median_m) + "," +
               val(r.client_stats, &ErrorStats::std_m) + "," +
               val(r.client_fixed_slope_stats, &ErrorStats::mean_m) + "\n";
    }
    write_text_file(dir / "summary.json", Json{{"rows", j}}.dump(2) + "\n");
    write_text_file(dir / "summary.csv", csv);
}

} // namespace rttloc
