// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors

#include "doctest.h"

#include "rttloc/error.hpp"
#include "rttloc/types.hpp"

#include <random>

using namespace rttloc;

TEST_CASE("round-trip constant") {
    CHECK(std::abs(kRoundTripNsPerM - 6.6713) < 5e-5);
}

TEST_CASE("tick duration") {
    CHECK(std::abs(tick_duration_ns(240e6) - 4.1667) < 0.001);
    CHECK(tick_duration_ns(1e9) == 1.0);
    CHECK(std::abs(tick_duration_ns(120e6) - 8.3333) < 1e-4);
    CHECK_THROWS_AS(tick_duration_ns(0.0), Error);
    CHECK_THROWS_AS(tick_duration_ns(-5.0), Error);
    try {
        tick_duration_ns(0.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidArgument);
    }
}

TEST_CASE("tick distance") {
    CHECK(std::abs(tick_distance_equiv_m(240e6) - 0.625) < 0.001);
    CHECK(std::abs(tick_distance_equiv_m(480e6) - tick_distance_equiv_m(240e6) / 2.0) < 1e-12);
    CHECK(std::abs(tick_distance_equiv_m(240e6, 2.0 * kSpeedOfLight) - 1.25) < 0.002);
    CHECK(tick_distance_equiv_m(240e6, 2.0 * kSpeedOfLight) ==
          doctest::Approx(2.0 * tick_distance_equiv_m(240e6)));
    CHECK_THROWS_AS(tick_distance_equiv_m(0.0), Error);
}

TEST_CASE("tick identity holds on random clocks") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> logf(3.0, 12.0);
    for (int i = 0; i < 1000; ++i) {
        const double f = std::pow(10.0, logf(rng));
        const double lhs = tick_distance_equiv_m(f) * 2.0 / kSpeedOfLight * 1e9;
        CHECK(lhs == doctest::Approx(tick_duration_ns(f)).epsilon(1e-12));
    }
}

TEST_CASE("ns and m conversions are inverse") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 500.0);
    for (int i = 0; i < 1000; ++i) {
        const double d = u(rng);
        CHECK(round_trip_ns_to_m(m_to_round_trip_ns(d)) == doctest::Approx(d).epsilon(1e-9));
    }
}

TEST_CASE("bounds") {
    const Bounds b{0, 0, 10, 5};
    CHECK(b.valid());
    CHECK(b.contains({10, 5}));
    CHECK_FALSE(b.contains({10.5, 5}));
    CHECK(b.contains({14.9, 5}, 5.0));
    CHECK(b.clamp({-3, 7}) == Position{0, 5});
    CHECK_FALSE((Bounds{0, 0, 0, 5}).valid());
}

TEST_CASE("AP record invariants") {
    ApRecord r;
    r.bssid = "aa:bb";
    CHECK_NOTHROW(validate(r));
    r.offset_ns = 15000.0;
    CHECK_THROWS_AS(validate(r), Error);
    r.offset_ns = 9000.0;
    r.slope_ns_per_m = 6.0;
    CHECK_THROWS_AS(validate(r), Error);
}

TEST_CASE("bssid canonicalization") {
    CHECK(canonical_bssid(" AA:Bb:01 ") == "aa:bb:01");
}
