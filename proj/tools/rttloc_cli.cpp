// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors
//
// rttloc command-line front end. One subcommand per pipeline phase:
//   simulate -> solve-aps -> fit-slopes -> localize / evaluate, plus merge-db.
// Option precedence: command-line flag > --config file > preset default.

#include "CLI11.hpp"

#include "rttloc/ap_solver.hpp"
#include "rttloc/client_solver.hpp"
#include "rttloc/error.hpp"
#include "rttloc/eval.hpp"
#include "rttloc/io.hpp"
#include "rttloc/parallel.hpp"
#include "rttloc/sim.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace rttloc;

namespace {

struct Options {
    std::string preset;
    std::string world_path;
    std::string samples_path;
    std::vector<std::string> db_paths;
    std::vector<std::string> db_inputs;   // merge-db positionals
    std::string out;
    std::vector<std::uint64_t> seeds;
    std::optional<std::size_t> trajectories;
    unsigned jobs = 1;
    bool ablation = false;
    std::size_t min_aps = 3;
    std::optional<double> rssi_cutoff_dbm;
    std::optional<double> noise_sigma_ns;
    std::optional<double> clock_hz;
    std::vector<double> bounds;
    std::string building;
    std::string batch;
    std::size_t min_samples = 30;
    double duration_s = 600.0;
    double test_grid_m = 8.0;
    std::size_t snapshot_measurements = 200;
    bool fixed_slope = false;
    bool error_json = false;
};

void add_measurement_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--rssi-cutoff-dbm", o.rssi_cutoff_dbm,
                    "Drop samples weaker than this RSSI, in dBm (preset: -60)");
    cmd->add_option("--noise-sigma-ns", o.noise_sigma_ns,
                    "Standard deviation of RTT noise, in nanoseconds (preset: 5)");
    cmd->add_option("--clock-hz", o.clock_hz,
                    "Timestamp clock rate in Hz; RTTs are quantized to one tick (preset: 240e6)")
        ->check(CLI::PositiveNumber);
}

void add_world_source(CLI::App* cmd, Options& o, bool with_bounds) {
    cmd->add_option("--preset", o.preset, "Floorplan preset name (A, B, C, D1, D2)");
    cmd->add_option("--world", o.world_path, "World description file (JSON)");
    if (with_bounds)
        cmd->add_option("--bounds", o.bounds, "Search rectangle min_x,min_y,max_x,max_y in meters")
            ->delimiter(',')
            ->expected(4);
}

void add_jobs(CLI::App* cmd, Options& o) {
    cmd->add_option("--jobs", o.jobs, "Worker threads; outputs do not depend on this (count)")
        ->check(CLI::Range(1u, 1024u));
}

void apply_measurement(MeasurementParams& m, const Options& o) {
    if (o.rssi_cutoff_dbm)
        m.rssi_cutoff_dbm = *o.rssi_cutoff_dbm;
    if (o.noise_sigma_ns) {
        if (*o.noise_sigma_ns < 0.0)
            throw Error(ErrorCode::InvalidArgument, "--noise-sigma-ns must be non-negative");
        m.noise_sigma_ns = *o.noise_sigma_ns;
    }
    if (o.clock_hz)
        m.clock_hz = *o.clock_hz;
}

std::uint64_t single_seed(const Options& o) {
    if (o.seeds.size() != 1)
        throw Error(ErrorCode::InvalidArgument, "exactly one --seed is required");
    return o.seeds.front();
}

WorldSpec resolve_world(const Options& o, std::uint64_t seed) {
    if (!o.preset.empty() && !o.world_path.empty())
        throw Error(ErrorCode::InvalidArgument, "--preset and --world are mutually exclusive");
    WorldSpec w;
    if (!o.world_path.empty()) {
        w = load_world(o.world_path);
        apply_measurement(w.measurement, o);
    } else if (!o.preset.empty()) {
        WorldConfig cfg = preset_config(o.preset, seed);
        apply_measurement(cfg.measurement, o);
        w = generate_world(cfg);
    } else {
        throw Error(ErrorCode::InvalidArgument, "one of --preset or --world is required");
    }
    validate(w);
    return w;
}

Bounds resolve_bounds(const Options& o) {
    if (!o.bounds.empty()) {
        const Bounds b{o.bounds[0], o.bounds[1], o.bounds[2], o.bounds[3]};
        if (!b.valid())
            throw Error(ErrorCode::InvalidArgument, "--bounds must have max > min on both axes");
        return b;
    }
    if (!o.world_path.empty())
        return load_world(o.world_path).bounds;
    if (!o.preset.empty()) {
        const Preset& p = find_preset(o.preset);
        return {0.0, 0.0, p.length_m, p.width_m};
    }
    throw Error(ErrorCode::InvalidArgument, "one of --bounds, --world or --preset is required");
}

std::string building_of(const Options& o) {
    if (!o.building.empty())
        return o.building;
    if (!o.world_path.empty())
        return load_world(o.world_path).name;
    if (!o.preset.empty())
        return o.preset;
    return "building";
}

void print_issues(const std::vector<ApIssue>& issues) {
    for (const auto& i : issues)
        std::cerr << "warning: " << i.bssid << ": " << to_string(i.code) << ": " << i.message
                  << "\n";
}

// Subcommands -----------------------------------------------------------------

int cmd_simulate(const Options& o) {
    const std::uint64_t seed = single_seed(o);
    if (o.out.empty())
        throw Error(ErrorCode::InvalidArgument, "--out is required");
    const WorldSpec w = resolve_world(o, seed);
    std::size_t count = 10;
    if (o.trajectories)
        count = *o.trajectories;
    else if (!o.preset.empty())
        count = find_preset(o.preset).trajectories;

    const SimulatedTraces traces = simulate_traces(w, count, seed, o.duration_s, o.jobs);
    const auto points = test_grid(w.bounds, o.test_grid_m, 2.0);
    const auto snaps = synthesize_test_snapshots(w, points, o.snapshot_measurements, seed);

    const fs::path dir(o.out);
    fs::create_directories(dir);
    save_world(dir / "world.json", w);
    write_trajectories(dir / "trajectories.jsonl", traces.trajectories);
    write_samples(dir / "samples.jsonl", traces.samples);
    write_samples(dir / "testpoints.jsonl", snaps);
    std::cout << "simulated " << traces.trajectories.size() << " trajectories, "
              << traces.samples.size() << " samples, " << w.aps.size() << " APs -> "
              << dir.string() << "\n";
    return 0;
}

int cmd_solve_aps(const Options& o) {
    if (o.samples_path.empty() || o.out.empty())
        throw Error(ErrorCode::InvalidArgument, "--samples and --out are required");
    const Bounds bounds = resolve_bounds(o);
    const auto samples = read_samples(o.samples_path);
    ApSolveConfig cfg;
    cfg.min_samples = o.min_samples;
    const ApBatchResult batch = solve_all(samples, bounds, cfg, false, o.jobs);
    print_issues(batch.issues);
    if (batch.reports.empty())
        throw Error(ErrorCode::InsufficientData,
                    "no AP could be solved from " + std::to_string(samples.size()) + " samples (" +
                        std::to_string(batch.issues.size()) + " BSSIDs below " +
                        std::to_string(cfg.min_samples) + " samples)");
    const std::string batch_id =
        o.batch.empty() ? fs::path(o.samples_path).stem().string() : o.batch;
    save_db(o.out, make_database(batch, building_of(o), batch_id, samples));
    std::cout << "solved " << batch.reports.size() << " APs, " << batch.issues.size()
              << " skipped -> " << o.out << "\n";
    return 0;
}

int cmd_fit_slopes(const Options& o) {
    if (o.db_paths.size() != 1 || o.samples_path.empty())
        throw Error(ErrorCode::InvalidArgument, "one --db and --samples are required");
    ApDatabase db = load_db(o.db_paths.front());
    const auto samples = read_samples(o.samples_path);
    const ApBatchResult r = fit_slopes(samples, db.record_list());
    print_issues(r.issues);
    for (const auto& rep : r.reports)
        db.records[rep.record.bssid] = rep.record;
    const std::string out = o.out.empty() ? o.db_paths.front() : o.out;
    save_db(out, db);
    std::cout << "fitted slopes for " << r.reports.size() - r.issues.size() << " of "
              << r.reports.size() << " APs -> " << out << "\n";
    return 0;
}

int cmd_localize(const Options& o) {
    if (o.db_paths.size() != 1 || o.samples_path.empty() || o.out.empty())
        throw Error(ErrorCode::InvalidArgument, "one --db, --samples and --out are required");
    const ApDatabase db = load_db(o.db_paths.front());
    const auto records = db.record_list();
    const Bounds bounds = resolve_bounds(o);
    const auto snaps = snapshots_from_samples(read_samples(o.samples_path));
    ClientSolveConfig cfg;
    cfg.min_distinct_aps = o.min_aps;

    std::vector<std::string> lines(snaps.size());
    parallel_for(snaps.size(), o.jobs, [&](std::size_t i) {
        Json j;
        j["id"] = snaps[i].id;
        try {
            const ClientFix f = o.fixed_slope ? localize_fixed_slope(snaps[i], records, bounds, cfg)
                                              : localize(snaps[i], records, bounds, cfg);
            j["status"] = "ok";
            j["x_m"] = f.position.x;
            j["y_m"] = f.position.y;
            j["loss_ns2"] = f.loss_ns2;
            j["matched_aps"] = f.matched_aps;
            j["unknown_bssids"] = f.unknown_bssids;
            j["converged"] = f.converged;
            j["residuals"] = Json::array();
            for (const auto& r : f.residuals)
                j["residuals"].push_back(Json{{"bssid", r.bssid},
                                              {"weight", r.weight},
                                              {"mean_rtt_ns", r.mean_rtt_ns},
                                              {"residual_ns", r.residual_ns}});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Underdetermined)
                throw;
            j["status"] = "discarded";
            j["reason"] = e.what();
        }
        lines[i] = j.dump() + "\n";
    });
    std::string text;
    std::size_t ok = 0;
    for (const auto& l : lines) {
        text += l;
        ok += l.find("\"status\":\"ok\"") != std::string::npos;
    }
    write_text_file(o.out, text);
    std::cout << "localized " << ok << " of " << snaps.size() << " snapshots -> " << o.out << "\n";
    return 0;
}

int cmd_evaluate(const Options& o) {
    if (o.out.empty())
        throw Error(ErrorCode::InvalidArgument, "--out is required");
    ClientSolveConfig client;
    client.min_distinct_aps = o.min_aps;

    if (!o.db_paths.empty()) {
        // Score an existing database and test-point snapshots against a world.
        if (o.db_paths.size() != 1 || o.world_path.empty() || o.samples_path.empty())
            throw Error(ErrorCode::InvalidArgument,
                        "evaluating a database needs one --db, --world and --samples");
        const WorldSpec w = load_world(o.world_path);
        const ApDatabase db = load_db(o.db_paths.front());
        const auto snaps = snapshots_from_samples(read_samples(o.samples_path));
        const ExperimentReport rep = evaluate(w, db, snaps, client, o.ablation, o.jobs);
        write_report(o.out, rep);
        std::cout << "evaluated " << rep.points.size() << " test points, " << rep.discarded.size()
                  << " discarded -> " << o.out << "\n";
        return 0;
    }

    // Full simulated experiment(s).
    if (o.seeds.empty())
        throw Error(ErrorCode::InvalidArgument, "--seed is required");
    ExperimentConfig cfg;
    cfg.client = client;
    cfg.ablation = o.ablation;
    cfg.jobs = o.jobs;
    cfg.trajectory_duration_s = o.duration_s;
    cfg.test_grid_m = o.test_grid_m;
    cfg.snapshot_measurements = o.snapshot_measurements;
    cfg.ap.min_samples = o.min_samples;

    const bool suite = o.preset == "all" || o.seeds.size() > 1;
    if (!suite) {
        const WorldSpec w = resolve_world(o, o.seeds.front());
        cfg.seed = o.seeds.front();
        cfg.trajectories = o.trajectories.value_or(
            o.preset.empty() ? std::size_t{10} : find_preset(o.preset).trajectories);
        const ExperimentReport rep = run_experiment(w, cfg);
        write_report(o.out, rep);
        std::cout << "evaluated " << rep.points.size() << " test points, " << rep.discarded.size()
                  << " discarded -> " << o.out << "\n";
        return 0;
    }
    if (!o.world_path.empty() || o.preset.empty())
        throw Error(ErrorCode::InvalidArgument, "multi-seed evaluation needs --preset");
    if (o.rssi_cutoff_dbm || o.noise_sigma_ns || o.clock_hz)
        throw Error(ErrorCode::InvalidArgument,
                    "measurement overrides apply to single-seed runs only");
    std::vector<std::string> names;
    if (o.preset == "all")
        for (const auto& p : presets())
            names.push_back(p.name);
    else
        names.push_back(find_preset(o.preset).name);
    cfg.trajectories = o.trajectories.value_or(0);
    const auto rows = run_suite(names, o.seeds, cfg);
    write_suite(o.out, rows);
    std::cout << "evaluated " << rows.size() << " presets over " << o.seeds.size() << " seeds -> "
              << o.out << "\n";
    return 0;
}

int cmd_merge_db(const Options& o) {
    if (o.db_paths.size() < 2 || o.out.empty())
        throw Error(ErrorCode::InvalidArgument, "at least two --db inputs and --out are required");
    ApDatabase merged = load_db(o.db_paths.front());
    for (std::size_t i = 1; i < o.db_paths.size(); ++i)
        merged = merge_db(merged, load_db(o.db_paths[i]));
    save_db(o.out, merged);
    std::cout << "merged " << o.db_paths.size() << " databases, " << merged.records.size()
              << " APs -> " << o.out << "\n";
    return 0;
}

std::string error_json(std::string_view code, std::string_view message) {
    Json j;
    j["error"] = Json{{"code", code}, {"message", message}};
    return j.dump();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rttloc: AP bootstrapping and client localization from one-way Wi-Fi RTT"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "INI/TOML file with option defaults; flags override it");
    Options o;
    app.add_flag("--error-json", o.error_json, "Report failures as one JSON line on stderr");

    auto* sim = app.add_subcommand("simulate", "Simulate a world, walks and test-point snapshots");
    add_world_source(sim, o, false);
    sim->add_option("--seed", o.seeds, "Random seed (integer)")->expected(1);
    sim->add_option("--trajectories", o.trajectories, "Number of walks (count; preset default)");
    sim->add_option("--duration-s", o.duration_s, "Time limit per walk, in seconds")
        ->check(CLI::PositiveNumber);
    sim->add_option("--test-grid-m", o.test_grid_m, "Test-point grid spacing, in meters")
        ->check(CLI::PositiveNumber);
    sim->add_option("--snapshot-measurements", o.snapshot_measurements,
                    "Measurements per test-point snapshot (count)");
    sim->add_option("--out", o.out, "Output directory");
    add_measurement_flags(sim, o);
    add_jobs(sim, o);

    auto* solve = app.add_subcommand("solve-aps", "Solve AP positions and offsets from samples");
    solve->add_option("--samples", o.samples_path, "Ranging samples (JSON Lines)");
    add_world_source(solve, o, true);
    solve->add_option("--out", o.out, "AP database to write (JSON)");
    solve->add_option("--building", o.building, "Building id stored in the database");
    solve->add_option("--batch", o.batch, "Batch id for provenance (default: samples file stem)");
    solve->add_option("--min-samples", o.min_samples, "Samples needed per AP (count)");
    add_jobs(solve, o);

    auto* fit = app.add_subcommand("fit-slopes", "Fit per-AP RTT-vs-distance slopes");
    fit->add_option("--db", o.db_paths, "AP database (JSON)")->expected(1);
    fit->add_option("--samples", o.samples_path, "Ranging samples (JSON Lines)");
    fit->add_option("--out", o.out, "Updated database (default: overwrite --db)");

    auto* loc = app.add_subcommand("localize", "Localize client snapshots against a database");
    loc->add_option("--db", o.db_paths, "AP database (JSON)")->expected(1);
    loc->add_option("--samples", o.samples_path,
                    "Snapshot samples (JSON Lines, grouped by traj_id)");
    add_world_source(loc, o, true);
    loc->add_option("--min-aps", o.min_aps, "Minimum distinct known APs per fix (count, >= 3)")
        ->check(CLI::Range(std::size_t{3}, std::size_t{1000}));
    loc->add_flag("--fixed-slope", o.fixed_slope, "Use the line-of-sight slope for every AP");
    loc->add_option("--out", o.out, "Fixes to write (JSON Lines)");
    add_jobs(loc, o);

    auto* ev = app.add_subcommand("evaluate", "Score a database, or run full simulated experiments");
    add_world_source(ev, o, false);
    ev->add_option("--db", o.db_paths, "AP database to score (JSON)")->expected(1);
    ev->add_option("--samples", o.samples_path, "Test-point snapshots (JSON Lines)");
    ev->add_option("--seed", o.seeds, "Seed or comma-separated seeds (integers)")->delimiter(',');
    ev->add_option("--trajectories", o.trajectories, "Number of walks (count; preset default)");
    ev->add_option("--duration-s", o.duration_s, "Time limit per walk, in seconds")
        ->check(CLI::PositiveNumber);
    ev->add_option("--test-grid-m", o.test_grid_m, "Test-point grid spacing, in meters")
        ->check(CLI::PositiveNumber);
    ev->add_option("--snapshot-measurements", o.snapshot_measurements,
                   "Measurements per test-point snapshot (count)");
    ev->add_option("--min-samples", o.min_samples, "Samples needed per AP (count)");
    ev->add_option("--min-aps", o.min_aps, "Minimum distinct known APs per fix (count, >= 3)")
        ->check(CLI::Range(std::size_t{3}, std::size_t{1000}));
    ev->add_flag("--ablation", o.ablation, "Also localize with the fixed line-of-sight slope");
    ev->add_option("--out", o.out, "Output directory for report files");
    add_measurement_flags(ev, o);
    add_jobs(ev, o);

    auto* merge = app.add_subcommand("merge-db", "Merge AP databases by sample-weighted averaging");
    merge->add_option("--db", o.db_paths, "Input databases (JSON; repeat or list)")
        ->delimiter(',');
    merge->add_option("inputs", o.db_inputs, "Input databases (JSON)");
    merge->add_option("--out", o.out, "Merged database to write (JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (o.error_json && e.get_exit_code() != 0) {
            std::cerr << error_json("UsageError", e.what()) << "\n";
            return 2;
        }
        return app.exit(e);
    }

    o.db_paths.insert(o.db_paths.end(), o.db_inputs.begin(), o.db_inputs.end());
    try {
        if (*sim)
            return cmd_simulate(o);
        if (*solve)
            return cmd_solve_aps(o);
        if (*fit)
            return cmd_fit_slopes(o);
        if (*loc)
            return cmd_localize(o);
        if (*ev)
            return cmd_evaluate(o);
        return cmd_merge_db(o);
    } catch (const Error& e) {
        if (o.error_json)
            std::cerr << error_json(to_string(e.code()), e.what()) << "\n";
        else
            std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        if (o.error_json)
            std::cerr << error_json("InternalError", e.what()) << "\n";
        else
            std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
