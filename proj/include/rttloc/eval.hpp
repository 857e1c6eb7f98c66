// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors
//
// End-to-end experiments: simulate traces, bootstrap anchors, localize test
// points and summarize errors.

#pragma once

#include "rttloc/ap_solver.hpp"
#include "rttloc/client_solver.hpp"
#include "rttloc/io.hpp"
#include "rttloc/sim.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rttloc {

struct CdfPoint {
    double error_m = 0.0;
    double fraction = 0.0;
};

/// Population standard deviation. For even counts the median is the mean of
/// the two middle values.
struct ErrorStats {
    double mean_m = 0.0;
    double median_m = 0.0;
    double std_m = 0.0;
    std::size_t count = 0;
    std::vector<CdfPoint> cdf;   // one point per distinct error value
};

ErrorStats compute_stats(std::span<const double> errors);
double mean_from_cdf(std::span<const CdfPoint> cdf);
double median_from_cdf(std::span<const CdfPoint> cdf);

struct ExperimentConfig {
    std::size_t trajectories = 10;
    std::uint64_t seed = 1;
    double trajectory_duration_s = 600.0;
    ApSolveConfig ap;
    ClientSolveConfig client;
    double test_grid_m = 8.0;
    double test_inset_m = 2.0;
    std::vector<Position> test_points;   // overrides the grid when non-empty
    std::size_t snapshot_measurements = 200;
    bool ablation = true;
    unsigned jobs = 1;
};

struct SimulatedTraces {
    std::vector<Trajectory> trajectories;
    std::vector<RangingSample> samples;   // trajectory order, then time
};

SimulatedTraces simulate_traces(const WorldSpec& world, std::size_t count, std::uint64_t seed,
                                double duration_s, unsigned jobs = 1);

/// Uniform grid over the bounds shrunk by `inset_m`.
std::vector<Position> test_grid(const Bounds& bounds, double spacing_m, double inset_m);

/// Snapshot samples for every test point, ids "tp-000", "tp-001", ...
std::vector<RangingSample> synthesize_test_snapshots(const WorldSpec& world,
                                                     std::span<const Position> points,
                                                     std::size_t count, std::uint64_t seed);

ApDatabase make_database(const ApBatchResult& batch, const std::string& building_id,
                         const std::string& batch_id, std::span<const RangingSample> samples);

struct ApEval {
    std::string bssid;
    Position truth;
    Position estimate;
    double error_m = 0.0;
    double true_offset_ns = 0.0;
    double offset_ns = 0.0;
    double true_slope_ns_per_m = 0.0;
    double slope_ns_per_m = 0.0;
    std::size_t sample_count = 0;
    bool low_confidence = false;
};

struct TestPointEval {
    std::string id;
    Position truth;
    Position estimate;
    double error_m = 0.0;
    std::optional<Position> fixed_slope_estimate;
    std::optional<double> fixed_slope_error_m;
    std::size_t matched_aps = 0;
    std::size_t nlos_paths = 0;   // matched links with >= 2 wall crossings
    std::size_t measurements = 0;
};

struct DiscardedPoint {
    std::string id;
    std::optional<Position> truth;
    std::size_t matched_aps = 0;
    std::string reason;
};

struct ExperimentReport {
    std::string world_name;
    std::uint64_t seed = 0;
    std::size_t trajectories = 0;
    std::size_t samples = 0;
    std::vector<ApEval> aps;
    std::vector<ApIssue> ap_issues;
    std::vector<TestPointEval> points;
    std::vector<DiscardedPoint> discarded;
    std::optional<ErrorStats> ap_stats;
    std::optional<ErrorStats> client_stats;
    std::optional<ErrorStats> client_fixed_slope_stats;
    double nlos_path_fraction = 0.0;   // over all matched links of evaluated points
};

/// Scores a database and a set of labelled snapshots against `world`.
ExperimentReport evaluate(const WorldSpec& world, const ApDatabase& db,
                          std::span<const ClientSnapshot> snapshots,
                          const ClientSolveConfig& client, bool ablation, unsigned jobs = 1);

/// simulate_traces -> solve_all -> synthesize_test_snapshots -> evaluate.
ExperimentReport run_experiment(const WorldSpec& world, const ExperimentConfig& config);

Json stats_to_json(const ErrorStats& stats);
Json report_to_json(const ExperimentReport& report);

/// report.json, ap_errors.csv, client_errors.csv and cdf_*.csv.
void write_report(const std::filesystem::path& dir, const ExperimentReport& report);

struct SuiteRow {
    std::string preset;
    std::size_t seeds = 0;
    std::size_t aps_solved = 0;
    std::size_t points_evaluated = 0;
    std::size_t points_discarded = 0;
    std::optional<ErrorStats> ap_stats;
    std::optional<ErrorStats> client_stats;
    std::optional<ErrorStats> client_fixed_slope_stats;
};

/// One row per preset, errors pooled over `seeds`. Trajectory counts follow
/// the preset unless `config.trajectories` is non-zero.
std::vector<SuiteRow> run_suite(std::span<const std::string> preset_names,
                                std::span<const std::uint64_t> seeds,
                                const ExperimentConfig& config);

void write_suite(const std::filesystem::path& dir, std::span<const SuiteRow> rows);

} // namespace rttloc
