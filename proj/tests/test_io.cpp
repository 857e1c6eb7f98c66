// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors

#include "doctest.h"

#include "rttloc/error.hpp"
#include "rttloc/io.hpp"
#include "rttloc/sim.hpp"

#include <filesystem>
#include <random>

using namespace rttloc;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rttloc_test_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::InvalidArgument;
}

ApRecord rec(const std::string& bssid, Position p, double offset, std::size_t n) {
    ApRecord r;
    r.bssid = bssid;
    r.position = p;
    r.offset_ns = offset;
    r.slope_ns_per_m = kRoundTripNsPerM * 1.2;
    r.sample_count = n;
    r.residual_rms_ns = 4.0;
    r.spread_m = 10.0;
    return r;
}

ApDatabase random_db(std::mt19937_64& rng, const std::string& batch) {
    std::uniform_real_distribution<double> u(0.0, 50.0), uc(8000.0, 12000.0), us(1.0, 2.0);
    std::uniform_int_distribution<std::size_t> n(0, 500);
    ApDatabase db;
    db.building_id = "bldg";
    for (int k = 0; k < 6; ++k) {
        ApRecord r = rec("02:00:00:00:00:0" + std::to_string(k), {u(rng), u(rng)}, uc(rng), n(rng));
        r.slope_ns_per_m = kRoundTripNsPerM * us(rng);
        r.residual_rms_ns = u(rng) / 5.0;
        db.records.emplace(r.bssid, r);
    }
    db.provenance.push_back({batch, 1000, u(rng)});
    return db;
}

void check_close(const ApDatabase& a, const ApDatabase& b) {
    REQUIRE(a.records.size() == b.records.size());
    for (const auto& [k, ra] : a.records) {
        const ApRecord& rb = b.records.at(k);
        CHECK(ra.position.x == doctest::Approx(rb.position.x).epsilon(1e-12));
        CHECK(ra.position.y == doctest::Approx(rb.position.y).epsilon(1e-12));
        CHECK(ra.offset_ns == doctest::Approx(rb.offset_ns).epsilon(1e-12));
        CHECK(ra.slope_ns_per_m == doctest::Approx(rb.slope_ns_per_m).epsilon(1e-12));
        CHECK(ra.residual_rms_ns == doctest::Approx(rb.residual_rms_ns).epsilon(1e-12));
        CHECK(ra.sample_count == rb.sample_count);
        CHECK(ra.spread_m == rb.spread_m);
        CHECK(ra.low_confidence == rb.low_confidence);
    }
    CHECK(a.provenance == b.provenance);
}

} // namespace

TEST_CASE("empty sample file reads as no samples") {
    const fs::path d = temp_dir("empty");
    write_text_file(d / "s.jsonl", "");
    CHECK(read_samples(d / "s.jsonl").empty());
    write_text_file(d / "blank.jsonl", "\n\n");
    CHECK(read_samples(d / "blank.jsonl").empty());
}

TEST_CASE("sample round trip is lossless and byte-stable") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-5.0, 100.0), ut(8000.0, 13000.0), ur(-60.0, -20.0);
    std::vector<RangingSample> samples;
    for (int i = 0; i < 1000; ++i)
        samples.push_back({{u(rng), u(rng)}, ut(rng), ur(rng), "02:00:00:00:00:0" + std::to_string(i % 7),
                           "traj-" + std::to_string(i % 3), i / 30.0});
    const fs::path d = temp_dir("rt");
    write_samples(d / "a.jsonl", samples);
    const auto back = read_samples(d / "a.jsonl");
    CHECK(back == samples);
    write_samples(d / "b.jsonl", back);
    CHECK(read_text_file(d / "a.jsonl") == read_text_file(d / "b.jsonl"));
}

TEST_CASE("sample parse errors name the line and field") {
    const fs::path d = temp_dir("bad");
    write_text_file(d / "s.jsonl",
                    "{\"x_m\":1,\"y_m\":2,\"t_ns\":9000,\"rssi_dbm\":-50,\"traj_id\":\"t\",\"time_s\":0}\n");
    try {
        read_samples(d / "s.jsonl");
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        const std::string msg = e.what();
        CHECK(msg.find("line 1") != std::string::npos);
        CHECK(msg.find("bssid") != std::string::npos);
    }
    CHECK(code_of([] {
              sample_from_line(
                  R"({"x_m":1,"y_m":2,"t_us":9,"rssi_dbm":-50,"bssid":"a","traj_id":"t","time_s":0})", 3);
          }) == ErrorCode::SchemaError);
    CHECK(code_of([] {
              sample_from_line(
                  R"({"x_m":1,"y_m":2,"t_ns":-1,"rssi_dbm":-50,"bssid":"a","traj_id":"t","time_s":0})", 1);
          }) == ErrorCode::ParseError);
    CHECK(code_of([] { sample_from_line("{not json", 1); }) == ErrorCode::ParseError);
}

TEST_CASE("database save and load") {
    ApDatabase db;
    db.building_id = "b1";
    db.records.emplace("a", rec("a", {1.5, 2.25}, 9123.456, 300));
    db.provenance.push_back({"batch-1", 300, 12.5});
    const fs::path d = temp_dir("db");
    save_db(d / "db.json", db);
    const ApDatabase back = load_db(d / "db.json");
    CHECK(back == db);
    save_db(d / "db2.json", back);
    CHECK(read_text_file(d / "db.json") == read_text_file(d / "db2.json"));
}

TEST_CASE("database validation") {
    ApDatabase db;
    db.building_id = "b1";
    db.records.emplace("a", rec("a", {1, 2}, 9000, 300));
    Json doc = db_to_json(db);
    doc["records"][0]["offset_ns"] = 15000.0;
    CHECK(code_of([&] { db_from_json(doc); }) == ErrorCode::InvariantViolation);

    Json v0 = db_to_json(db);
    v0["version"] = 0;
    CHECK(code_of([&] { db_from_json(v0); }) == ErrorCode::UnsupportedVersion);

    const fs::path d = temp_dir("dbbad");
    write_text_file(d / "x.json", "[1,2");
    CHECK(code_of([&] { load_db(d / "x.json"); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { load_db(d / "missing.json"); }) == ErrorCode::IoError);
}

TEST_CASE("merge weighting") {
    ApDatabase a, b;
    a.building_id = b.building_id = "b";
    a.records.emplace("x", rec("x", {0, 0}, 9000, 10));
    b.records.emplace("x", rec("x", {4, 0}, 10000, 30));
    const ApDatabase m = merge_db(a, b);
    const ApRecord& r = m.records.at("x");
    CHECK(r.position.x == doctest::Approx(3.0));
    CHECK(r.offset_ns == doctest::Approx(9750.0));
    CHECK(r.sample_count == 40);

    ApDatabase c;
    c.building_id = "other";
    CHECK(code_of([&] { merge_db(a, c); }) == ErrorCode::MergeError);
}

TEST_CASE("merge identity, commutativity and associativity") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const ApDatabase a = random_db(rng, "a");
        const ApDatabase b = random_db(rng, "b");
        const ApDatabase c = random_db(rng, "c");
        ApDatabase empty;
        empty.building_id = "bldg";
        CHECK(merge_db(a, empty) == a);
        CHECK(merge_db(empty, a) == a);
        CHECK(merge_db(a, b) == merge_db(b, a));
        check_close(merge_db(merge_db(a, b), c), merge_db(a, merge_db(b, c)));
        for (const auto& [k, r] : merge_db(a, b).records)
            validate(r);
    }
}

TEST_CASE("world round trip") {
    const WorldSpec w = generate_world(preset_config("D1", 6));
    const Json doc = world_to_json(w);
    const WorldSpec back = world_from_json(doc);
    CHECK(world_to_json(back).dump() == doc.dump());
    Json bad = doc;
    bad["version"] = 7;
    CHECK(code_of([&] { world_from_json(bad); }) == ErrorCode::UnsupportedVersion);
}
