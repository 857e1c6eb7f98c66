// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors

#pragma once

#include "rttloc/types.hpp"

#include <span>

namespace rttloc {

struct Segment {
    Position a;
    Position b;
};

/// Proper or touching intersection of two closed segments.
bool segments_intersect(const Segment& s, const Segment& t);

/// Largest pairwise distance among `points` (0 for fewer than two points).
double point_set_diameter(std::span<const Position> points);

} // namespace rttloc
