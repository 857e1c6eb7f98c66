// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors

#include "doctest.h"

#include "rttloc/client_solver.hpp"
#include "rttloc/error.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <random>

using namespace rttloc;
using testing::oracle_slope;

namespace {

ApRecord record(const std::string& bssid, Position p, double offset, double slope) {
    ApRecord r;
    r.bssid = bssid;
    r.position = p;
    r.offset_ns = offset;
    r.slope_ns_per_m = slope;
    r.sample_count = 100;
    return r;
}

ClientSnapshot exact_snapshot(Position at, std::span<const ApRecord> db, int repeats = 1) {
    ClientSnapshot s{"s", {}, at};
    for (int k = 0; k < repeats; ++k)
        for (const auto& ap : db) {
            const double d = std::hypot(at.x - ap.position.x, at.y - ap.position.y);
            s.measurements.push_back({ap.offset_ns + ap.slope_ns_per_m * d, -50.0, ap.bssid});
        }
    return s;
}

const std::vector<ApRecord> kTriangle{record("a", {0, 0}, 9000, oracle_slope()),
                                      record("b", {20, 0}, 10000, oracle_slope()),
                                      record("c", {0, 20}, 11000, oracle_slope())};
const Bounds kBox{0, 0, 20, 20};

} // namespace

TEST_CASE("exact three-anchor fix") {
    const ClientFix f = localize(exact_snapshot({5, 5}, kTriangle), kTriangle, kBox, {});
    CHECK(std::abs(f.position.x - 5.0) < 0.05);
    CHECK(std::abs(f.position.y - 5.0) < 0.05);
    CHECK(f.matched_aps == 3);
    CHECK(f.residuals.size() == 3);
    CHECK(f.loss_ns2 < 1e-6);
}

TEST_CASE("two known anchors are underdetermined") {
    const std::vector<ApRecord> two(kTriangle.begin(), kTriangle.begin() + 2);
    ClientSnapshot s = exact_snapshot({5, 5}, kTriangle);
    try {
        localize(s, two, kBox, {});
        FAIL("expected Underdetermined");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Underdetermined);
    }
    ClientSolveConfig bad;
    bad.min_distinct_aps = 2;
    CHECK_THROWS_AS(localize(s, kTriangle, kBox, bad), Error);
}

TEST_CASE("repeated measurements and unknown BSSIDs") {
    ClientSnapshot s = exact_snapshot({3, 7}, kTriangle, 4);
    s.measurements.push_back({9999.0, -70.0, "zz"});
    s.measurements.push_back({9998.0, -70.0, "zz"});
    const ClientFix f = localize(s, kTriangle, kBox, {});
    CHECK(f.unknown_bssids == 1);
    CHECK(f.unknown_measurements == 2);
    for (const auto& r : f.residuals)
        CHECK(r.weight == 4);
    CHECK(distance(f.position, {3, 7}) < 0.05);
}

TEST_CASE("fixed slope agrees when every anchor is line of sight") {
    const ClientSnapshot s = exact_snapshot({6, 2}, kTriangle);
    const ClientFix a = localize(s, kTriangle, kBox, {});
    const ClientFix b = localize_fixed_slope(s, kTriangle, kBox, {});
    CHECK(distance(a.position, b.position) < 1e-6);
}

TEST_CASE("solver dominates a fine lattice search") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 20.0), uc(8000.0, 12000.0), us(1.0, 1.5);
    std::normal_distribution<double> noise(0.0, 8.0);
    const Bounds b{0, 0, 20, 20};
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<ApRecord> db;
        for (int k = 0; k < 4; ++k)
            db.push_back(record("ap" + std::to_string(k), {u(rng), u(rng)}, uc(rng),
                                us(rng) * oracle_slope()));
        ClientSnapshot s = exact_snapshot({u(rng), u(rng)}, db, 5);
        for (auto& m : s.measurements)
            m.rtt_ns += noise(rng);
        const ClientFix f = localize(s, db, b, {});
        const auto oracle = testing::client_lattice_oracle(s, db, b, 0.1);
        CHECK(f.loss_ns2 <= oracle.loss * (1.0 + 1e-9));
    }
}

TEST_CASE("translation equivariance") {
    const Position shift{137.5, -42.25};
    std::vector<ApRecord> moved = kTriangle;
    for (auto& r : moved)
        r.position = {r.position.x + shift.x, r.position.y + shift.y};
    const Bounds box2{kBox.min_x + shift.x, kBox.min_y + shift.y, kBox.max_x + shift.x,
                      kBox.max_y + shift.y};
    ClientSnapshot s = exact_snapshot({4, 6}, kTriangle);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> noise(0.0, 3.0);
    for (auto& m : s.measurements)
        m.rtt_ns += noise(rng);
    const ClientFix a = localize(s, kTriangle, kBox, {});
    const ClientFix b = localize(s, moved, box2, {});
    CHECK(std::abs(b.position.x - shift.x - a.position.x) < 1e-6);
    CHECK(std::abs(b.position.y - shift.y - a.position.y) < 1e-6);
}

TEST_CASE("measurement order does not matter") {
    ClientSnapshot s = exact_snapshot({2, 3}, kTriangle, 6);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> noise(0.0, 5.0);
    for (auto& m : s.measurements)
        m.rtt_ns += noise(rng);
    const ClientFix a = localize(s, kTriangle, kBox, {});
    for (int k = 0; k < 5; ++k) {
        std::shuffle(s.measurements.begin(), s.measurements.end(), rng);
        const ClientFix b = localize(s, kTriangle, kBox, {});
        CHECK(a.position == b.position);
        CHECK(a.loss_ns2 == b.loss_ns2);
    }
}

TEST_CASE("a consistent fourth anchor keeps the exact fix") {
    std::vector<ApRecord> four = kTriangle;
    four.push_back(record("d", {20, 20}, 9500, oracle_slope()));
    const ClientFix f = localize(exact_snapshot({7, 4}, four), four, kBox, {});
    CHECK(distance(f.position, {7, 4}) < 0.05);
    CHECK(f.matched_aps == 4);
}

TEST_CASE("snapshots from samples split on trajectory id") {
    std::vector<RangingSample> s{{{1, 1}, 9000, -50, "a", "p0", 0}, {{1, 1}, 9100, -50, "b", "p0", 0},
                                 {{2, 2}, 9200, -50, "a", "p1", 0}};
    const auto snaps = snapshots_from_samples(s);
    REQUIRE(snaps.size() == 2);
    CHECK(snaps[0].measurements.size() == 2);
    CHECK(snaps[1].label == Position{2, 2});
}
