// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors

#include "doctest.h"

#include "rttloc/error.hpp"
#include "rttloc/eval.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <filesystem>
#include <random>

using namespace rttloc;
using testing::make_ap;

TEST_CASE("error statistics") {
    const std::vector<double> three{1.0, 2.0, 3.0};
    ErrorStats s = compute_stats(three);
    CHECK(s.mean_m == 2.0);
    CHECK(s.median_m == 2.0);
    CHECK(s.std_m == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
    CHECK(s.count == 3);

    const std::vector<double> one{5.0};
    s = compute_stats(one);
    CHECK(s.mean_m == 5.0);
    CHECK(s.median_m == 5.0);
    CHECK(s.std_m == 0.0);

    const std::vector<double> four{4.0, 1.0, 3.0, 2.0};
    CHECK(compute_stats(four).median_m == 2.5);

    CHECK_THROWS_AS(compute_stats(std::vector<double>{}), Error);
}

TEST_CASE("CDF agrees with the summary statistics") {
    std::mt19937_64 rng(12);
    std::exponential_distribution<double> e(0.5);
    for (int n : {1, 2, 7, 100, 101}) {
        std::vector<double> x(static_cast<std::size_t>(n));
        for (auto& v : x)
            v = std::round(e(rng) * 4.0) / 4.0;   // force ties
        const ErrorStats s = compute_stats(x);
        REQUIRE_FALSE(s.cdf.empty());
        CHECK(s.cdf.back().fraction == 1.0);
        for (std::size_t i = 1; i < s.cdf.size(); ++i) {
            CHECK(s.cdf[i].error_m > s.cdf[i - 1].error_m);
            CHECK(s.cdf[i].fraction > s.cdf[i - 1].fraction);
        }
        CHECK(mean_from_cdf(s.cdf) == doctest::Approx(s.mean_m).epsilon(1e-12));
        CHECK(median_from_cdf(s.cdf) == doctest::Approx(s.median_m).epsilon(1e-12));
        std::sort(x.begin(), x.end());
        const auto distinct = std::unique(x.begin(), x.end()) - x.begin();
        CHECK(static_cast<long>(s.cdf.size()) == distinct);
    }
}

TEST_CASE("test grid stays inside the inset box") {
    const Bounds b{0, 0, 30, 20};
    const auto g = test_grid(b, 8.0, 2.0);
    REQUIRE_FALSE(g.empty());
    for (const auto& p : g) {
        CHECK(p.x >= 2.0);
        CHECK(p.x <= 28.0);
        CHECK(p.y >= 2.0);
        CHECK(p.y <= 18.0);
    }
}

TEST_CASE("noiseless world is recovered to within one tick distance") {
    const WorldSpec w = testing::quiet_world(
        30, {make_ap("02:00:00:00:00:01", {4, 6}, 9000), make_ap("02:00:00:00:00:02", {26, 9}, 10400),
             make_ap("02:00:00:00:00:03", {15, 25}, 11700)});
    ExperimentConfig cfg;
    cfg.seed = 3;
    cfg.trajectories = 4;
    const ExperimentReport r = run_experiment(w, cfg);
    REQUIRE(r.aps.size() == 3);
    REQUIRE(r.ap_stats.has_value());
    REQUIRE(r.client_stats.has_value());
    const double tick_m = tick_distance_equiv_m(kDefaultClockHz);
    CHECK(r.ap_stats->mean_m < tick_m);
    CHECK(r.client_stats->mean_m < tick_m);
    CHECK(r.discarded.empty());
    CHECK(r.nlos_path_fraction == 0.0);
}

TEST_CASE("points hearing fewer than three anchors are discarded") {
    WorldConfig wc;
    wc.length_m = 60;
    wc.width_m = 20;
    wc.interior_walls = false;
    wc.measurement.noise_sigma_ns = 0.0;
    wc.explicit_aps = {make_ap("02:00:00:00:00:01", {5, 10}, 9000),
                       make_ap("02:00:00:00:00:02", {15, 10}, 10000),
                       make_ap("02:00:00:00:00:03", {55, 10}, 11000)};
    const WorldSpec w = generate_world(wc);
    ExperimentConfig cfg;
    cfg.seed = 5;
    cfg.trajectories = 6;
    cfg.test_points = {{2, 10}, {30, 10}};
    const ExperimentReport r = run_experiment(w, cfg);
    REQUIRE(r.aps.size() == 3);
    REQUIRE(r.discarded.size() == 1);
    CHECK(r.discarded[0].id == "tp-000");
    CHECK(r.discarded[0].matched_aps == 2);
    REQUIRE(r.points.size() == 1);
    CHECK(r.points[0].id == "tp-001");
    CHECK(r.points[0].matched_aps == 3);
    CHECK(r.client_stats->count == 1);
}

TEST_CASE("experiments are reproducible and independent of worker count") {
    const WorldSpec w = generate_world(preset_config("C", 2));
    ExperimentConfig cfg;
    cfg.seed = 2;
    cfg.trajectories = 4;
    cfg.jobs = 1;
    const std::string a = report_to_json(run_experiment(w, cfg)).dump();
    cfg.jobs = 6;
    const std::string b = report_to_json(run_experiment(w, cfg)).dump();
    CHECK(a == b);
}

TEST_CASE("report files") {
    const WorldSpec w = generate_world(preset_config("C", 1));
    ExperimentConfig cfg;
    cfg.trajectories = 3;
    const ExperimentReport r = run_experiment(w, cfg);
    const auto dir = std::filesystem::temp_directory_path() / "rttloc_test_eval_report";
    std::filesystem::remove_all(dir);
    write_report(dir, r);
    for (const char* f : {"report.json", "ap_errors.csv", "client_errors.csv", "cdf_ap.csv",
                          "cdf_client.csv", "cdf_client_fixed_slope.csv"})
        CHECK(std::filesystem::exists(dir / f));
}

TEST_CASE("floorplan A mean client error over seeds 1-5") {
    std::vector<double> errors;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ExperimentConfig cfg;
        cfg.seed = seed;
        cfg.ablation = false;
        cfg.jobs = 4;
        const ExperimentReport r = run_experiment(generate_world(preset_config("A", seed)), cfg);
        for (const auto& p : r.points)
            errors.push_back(p.error_m);
    }
    const ErrorStats s = compute_stats(errors);
    MESSAGE("pooled client mean " << s.mean_m << " m over " << s.count << " points");
    CHECK(s.mean_m <= 4.0);
}
