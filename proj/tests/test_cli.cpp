// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors
//
// Drives the installed command-line binary end to end.

#include "doctest.h"

#include "rttloc/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>

namespace fs = std::filesystem;
using rttloc::Json;
using rttloc::read_text_file;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "rttloc_test_cli";

int run(const std::string& args, const std::string& log = "log.txt") {
    fs::create_directories(kRoot);
    const std::string cmd = std::string(RTTLOC_CLI_PATH) + " " + args + " >" +
                            (kRoot / log).string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return status;
}

std::string log_text(const std::string& log = "log.txt") { return read_text_file(kRoot / log); }

std::string p(const std::string& rel) { return (kRoot / rel).string(); }

} // namespace

TEST_CASE("simulate writes deterministic trace files") {
    fs::remove_all(kRoot);
    REQUIRE(run("simulate --preset A --trajectories 10 --seed 7 --out " + p("a1")) == 0);
    REQUIRE(run("simulate --preset A --trajectories 10 --seed 7 --out " + p("a2")) == 0);
    for (const char* f : {"world.json", "trajectories.jsonl", "samples.jsonl", "testpoints.jsonl"}) {
        REQUIRE(fs::exists(kRoot / "a1" / f));
        CHECK(read_text_file(kRoot / "a1" / f) == read_text_file(kRoot / "a2" / f));
    }
    CHECK(rttloc::read_samples(kRoot / "a1" / "samples.jsonl").size() > 0);
}

TEST_CASE("unknown preset lists the valid names") {
    CHECK(run("simulate --preset Z --seed 1 --out " + p("z")) != 0);
    const std::string msg = log_text();
    for (const char* name : {"A", "B", "C", "D1", "D2"})
        CHECK(msg.find(name) != std::string::npos);
}

TEST_CASE("solve-aps on an empty file fails with a summary") {
    rttloc::write_text_file(kRoot / "empty.jsonl", "");
    CHECK(run("--error-json solve-aps --preset A --samples " + p("empty.jsonl") + " --out " +
              p("e.json")) != 0);
    const Json err = Json::parse(log_text());
    CHECK(err["error"]["code"] == "insufficient-data");
    CHECK_FALSE(fs::exists(kRoot / "e.json"));
}

TEST_CASE("phase commands chain and ablation adds fixed-slope stats") {
    REQUIRE(run("simulate --preset C --seed 3 --out " + p("c")) == 0);
    const std::string world = " --world " + p("c/world.json");
    REQUIRE(run("solve-aps --samples " + p("c/samples.jsonl") + world + " --out " + p("c/db.json")) ==
            0);
    REQUIRE(run("fit-slopes --db " + p("c/db.json") + " --samples " + p("c/samples.jsonl")) == 0);
    REQUIRE(run("localize --db " + p("c/db.json") + " --samples " + p("c/testpoints.jsonl") + world +
                " --out " + p("c/fixes.jsonl")) == 0);
    CHECK_FALSE(read_text_file(kRoot / "c" / "fixes.jsonl").empty());

    const std::string eval = "evaluate" + world + " --db " + p("c/db.json") + " --samples " +
                             p("c/testpoints.jsonl");
    REQUIRE(run(eval + " --ablation --out " + p("c/ev_on")) == 0);
    REQUIRE(run(eval + " --out " + p("c/ev_off")) == 0);
    const Json on = Json::parse(read_text_file(kRoot / "c/ev_on/report.json"));
    const Json off = Json::parse(read_text_file(kRoot / "c/ev_off/report.json"));
    CHECK(on["client_stats"].is_object());
    CHECK(on["client_fixed_slope_stats"].is_object());
    CHECK(off["client_fixed_slope_stats"].is_null());
    REQUIRE(on["test_points"].size() > 0);
    for (const auto& pt : on["test_points"])
        CHECK(pt["matched_aps"].get<int>() >= 3);
}

TEST_CASE("merge-db combines databases") {
    REQUIRE(run("simulate --preset C --seed 3 --trajectories 3 --out " + p("m1")) == 0);
    REQUIRE(run("simulate --preset C --seed 3 --trajectories 5 --out " + p("m2")) == 0);
    REQUIRE(run("solve-aps --preset C --building C --samples " + p("m1/samples.jsonl") + " --out " +
                p("m1/db.json")) == 0);
    REQUIRE(run("solve-aps --preset C --building C --samples " + p("m2/samples.jsonl") + " --out " +
                p("m2/db.json")) == 0);
    REQUIRE(run("merge-db " + p("m1/db.json") + " " + p("m2/db.json") + " --out " + p("m.json")) == 0);
    const auto merged = rttloc::load_db(kRoot / "m.json");
    CHECK(merged.provenance.size() == 2);
    CHECK(run("merge-db " + p("m1/db.json") + " --out " + p("m.json")) != 0);
}

TEST_CASE("flag beats config file beats preset") {
    rttloc::write_text_file(kRoot / "cfg.toml",
                            "[simulate]\nnoise-sigma-ns = 0\nrssi-cutoff-dbm = -70\n");
    REQUIRE(run("--config " + p("cfg.toml") + " simulate --preset C --seed 1 --trajectories 1 "
                "--noise-sigma-ns 2 --out " + p("cfg")) == 0);
    const Json w = Json::parse(read_text_file(kRoot / "cfg" / "world.json"));
    CHECK(w["measurement"]["noise_sigma_ns"] == 2.0);
    CHECK(w["measurement"]["rssi_cutoff_dbm"] == -70.0);
    CHECK(w["measurement"]["clock_hz"] == 240e6);
}

TEST_CASE("help documents units") {
    REQUIRE(run("simulate --help") == 0);
    const std::string sim = log_text();
    CHECK(sim.find("dBm") != std::string::npos);
    CHECK(sim.find("nanoseconds") != std::string::npos);
    CHECK(sim.find("Hz") != std::string::npos);
    CHECK(sim.find("seconds") != std::string::npos);
    REQUIRE(run("evaluate --help") == 0);
    const std::string ev = log_text();
    for (const char* flag : {"--preset", "--world", "--samples", "--db", "--out", "--seed",
                             "--trajectories", "--jobs", "--ablation", "--min-aps",
                             "--rssi-cutoff-dbm", "--noise-sigma-ns", "--clock-hz"})
        CHECK(ev.find(flag) != std::string::npos);
}

TEST_CASE("missing subcommand is an error") {
    CHECK(run("") != 0);
}
