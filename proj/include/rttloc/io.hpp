// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors
//
// File formats:
//   samples      JSON Lines, one RangingSample per line with fields
//                x_m, y_m, t_ns, rssi_dbm, bssid, traj_id, time_s
//   trajectories JSON Lines, one waypoint per line
//   AP database  single JSON document, versioned
//   world        single JSON document, versioned
// Numbers are written in shortest round-trip form and fields in a fixed
// order, so write(read(write(x))) is byte-identical to write(x).

#pragma once

#include "rttloc/sim.hpp"
#include "rttloc/types.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rttloc {

using Json = nlohmann::ordered_json;

inline constexpr int kDbVersion = 1;
inline constexpr int kWorldVersion = 1;

// Samples --------------------------------------------------------------------

std::string sample_to_line(const RangingSample& sample);

/// `line_no` is 1-based and only used in error messages.
RangingSample sample_from_line(std::string_view line, std::size_t line_no);

std::vector<RangingSample> read_samples(const std::filesystem::path& path);
void write_samples(const std::filesystem::path& path, std::span<const RangingSample> samples);

void write_trajectories(const std::filesystem::path& path, std::span<const Trajectory> trajs);

// AP database ----------------------------------------------------------------

struct ProvenanceEntry {
    std::string batch_id;
    std::size_t sample_count = 0;
    double timestamp_s = 0.0;   // latest sample time in the batch

    friend bool operator==(const ProvenanceEntry&, const ProvenanceEntry&) = default;
};

struct ApDatabase {
    std::string building_id;
    std::map<std::string, ApRecord> records;
    std::vector<ProvenanceEntry> provenance;

    std::vector<ApRecord> record_list() const;
    friend bool operator==(const ApDatabase&, const ApDatabase&) = default;
};

Json db_to_json(const ApDatabase& db);
ApDatabase db_from_json(const Json& doc);
void save_db(const std::filesystem::path& path, const ApDatabase& db);
ApDatabase load_db(const std::filesystem::path& path);

/// Sample-count-weighted average of records present in both inputs.
ApDatabase merge_db(const ApDatabase& a, const ApDatabase& b);

// World ----------------------------------------------------------------------

Json world_to_json(const WorldSpec& world);
WorldSpec world_from_json(const Json& doc);
void save_world(const std::filesystem::path& path, const WorldSpec& world);
WorldSpec load_world(const std::filesystem::path& path);

// Helpers --------------------------------------------------------------------

/// Writes through a temporary file in the same directory and renames it into
/// place.
void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

} // namespace rttloc
