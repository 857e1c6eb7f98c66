// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The rttloc Authors

#include "rttloc/io.hpp"

#include "rttloc/error.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <tuple>

namespace rttloc {
namespace {

namespace fs = std::filesystem;

constexpr std::array<std::string_view, 7> kSampleFields = {
    "x_m", "y_m", "t_ns", "rssi_dbm", "bssid", "traj_id", "time_s"};

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

double number_field(const Json& obj, std::string_view key, const std::string& ctx) {
    const auto it = obj.find(key);
    if (it == obj.end())
        throw Error(ErrorCode::ParseError, ctx + "missing field '" + std::string(key) + "'");
    if (!it->is_number())
        throw Error(ErrorCode::ParseError, ctx + "field '" + std::string(key) + "' is not a number");
    return it->get<double>();
}

std::string string_field(const Json& obj, std::string_view key, const std::string& ctx) {
    const auto it = obj.find(key);
    if (it == obj.end())
        throw Error(ErrorCode::ParseError, ctx + "missing field '" + std::string(key) + "'");
    if (!it->is_string())
        throw Error(ErrorCode::ParseError, ctx + "field '" + std::string(key) + "' is not a string");
    return it->get<std::string>();
}

bool bool_field(const Json& obj, std::string_view key, bool fallback) {
    const auto it = obj.find(key);
    if (it == obj.end())
        return fallback;
    if (!it->is_boolean())
        throw Error(ErrorCode::ParseError, "field '" + std::string(key) + "' is not a boolean");
    return it->get<bool>();
}

double optional_number(const Json& obj, std::string_view key, double fallback) {
    return obj.contains(key) ? number_field(obj, key, "") : fallback;
}

// A field like "t_us" in place of "t_ns" is a unit bug, not an extension.
void check_unit_suffixes(const Json& obj, const std::string& ctx) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find(kSampleFields.begin(), kSampleFields.end(), key) != kSampleFields.end())
            continue;
        const auto us = key.rfind('_');
        if (us == std::string::npos)
            continue;
        const std::string stem = key.substr(0, us);
        for (std::string_view expected : kSampleFields) {
            if (expected == "bssid" || expected == "traj_id")
                continue;
            if (expected.substr(0, expected.rfind('_')) == stem)
                throw Error(ErrorCode::SchemaError, ctx + "field '" + key +
                                                        "' has the wrong unit suffix, expected '" +
                                                        std::string(expected) + "'");
        }
    }
}

ApRecord record_from_json(const Json& r) {
    ApRecord rec;
    rec.bssid = canonical_bssid(string_field(r, "bssid", "record: "));
    rec.position = {number_field(r, "x_m", "record: "), number_field(r, "y_m", "record: ")};
    rec.offset_ns = number_field(r, "offset_ns", "record: ");
    rec.slope_ns_per_m = number_field(r, "slope_ns_per_m", "record: ");
    const double count = number_field(r, "sample_count", "record: ");
    if (count < 0.0)
        throw Error(ErrorCode::InvariantViolation, "record " + rec.bssid + ": negative sample_count");
    rec.sample_count = static_cast<std::size_t>(count);
    rec.residual_rms_ns = optional_number(r, "residual_rms_ns", 0.0);
    rec.spread_m = optional_number(r, "spread_m", 0.0);
    rec.low_confidence = bool_field(r, "low_confidence", false);
    validate(rec);
    return rec;
}

Json record_to_json(const ApRecord& rec) {
    Json r;
    r["bssid"] = rec.bssid;
    r["x_m"] = rec.position.x;
    r["y_m"] = rec.position.y;
    r["offset_ns"] = rec.offset_ns;
    r["slope_ns_per_m"] = rec.slope_ns_per_m;
    r["sample_count"] = rec.sample_count;
    r["residual_rms_ns"] = rec.residual_rms_ns;
    r["spread_m"] = rec.spread_m;
    r["low_confidence"] = rec.low_confidence;
    return r;
}

Json position_to_json(Position p) { return Json{{"x_m", p.x}, {"y_m", p.y}}; }

Position position_from_json(const Json& j) {
    return {number_field(j, "x_m", ""), number_field(j, "y_m", "")};
}

void require_version(const Json& doc, int version, std::string_view what) {
    if (!doc.is_object())
        throw Error(ErrorCode::ParseError, std::string(what) + " must be a JSON object");
    const auto it = doc.find("version");
    if (it == doc.end() || !it->is_number_integer() || it->get<int>() != version)
        throw Error(ErrorCode::UnsupportedVersion,
                    std::string(what) + " version " + (it == doc.end() ? "missing" : it->dump()) +
                        ", this reader supports version " + std::to_string(version));
}

Json parse_document(const fs::path& path) {
    const std::string text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

} // namespace

// Samples --------------------------------------------------------------------

std::string sample_to_line(const RangingSample& s) {
    Json j;
    j["x_m"] = s.position.x;
    j["y_m"] = s.position.y;
    j["t_ns"] = s.rtt_ns;
    j["rssi_dbm"] = s.rssi_dbm;
    j["bssid"] = s.bssid;
    j["traj_id"] = s.trajectory_id;
    j["time_s"] = s.time_s;
    return j.dump();
}

RangingSample sample_from_line(std::string_view line, std::size_t line_no) {
    const std::string ctx = where(line_no);
    Json j;
    try {
        j = Json::parse(line);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::ParseError, ctx + e.what());
    }
    if (!j.is_object())
        throw Error(ErrorCode::ParseError, ctx + "expected a JSON object");
    check_unit_suffixes(j, ctx);
    RangingSample s;
    s.position = {number_field(j, "x_m", ctx), number_field(j, "y_m", ctx)};
    s.rtt_ns = number_field(j, "t_ns", ctx);
    s.rssi_dbm = number_field(j, "rssi_dbm", ctx);
    s.bssid = canonical_bssid(string_field(j, "bssid", ctx));
    s.trajectory_id = string_field(j, "traj_id", ctx);
    s.time_s = number_field(j, "time_s", ctx);
    if (s.bssid.empty())
        throw Error(ErrorCode::ParseError, ctx + "empty bssid");
    if (!(s.rtt_ns > 0.0))
        throw Error(ErrorCode::ParseError, ctx + "t_ns must be positive");
    return s;
}

std::vector<RangingSample> read_samples(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::vector<RangingSample> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        out.push_back(sample_from_line(line, line_no));
    }
    return out;
}

void write_samples(const fs::path& path, std::span<const RangingSample> samples) {
    std::string text;
    for (const auto& s : samples) {
        text += sample_to_line(s);
        text += '\n';
    }
    write_text_file(path, text);
}

void write_trajectories(const fs::path& path, std::span<const Trajectory> trajs) {
    std::string text;
    for (const auto& t : trajs) {
        for (const auto& w : t.waypoints) {
            Json j;
            j["traj_id"] = t.id;
            j["time_s"] = w.time_s;
            j["true_x_m"] = w.truth.x;
            j["true_y_m"] = w.truth.y;
            j["est_x_m"] = w.estimate.x;
            j["est_y_m"] = w.estimate.y;
            j["indoor"] = w.indoor;
            text += j.dump();
            text += '\n';
        }
    }
    write_text_file(path, text);
}

// AP database ----------------------------------------------------------------

std::vector<ApRecord> ApDatabase::record_list() const {
    std::vector<ApRecord> out;
    out.reserve(records.size());
    for (const auto& [_, r] : records)
        out.push_back(r);
    return out;
}

Json db_to_json(const ApDatabase& db) {
    Json doc;
    doc["format"] = "rttloc-ap-db";
    doc["version"] = kDbVersion;
    doc["building_id"] = db.building_id;
    doc["records"] = Json::array();
    for (const auto& [_, rec] : db.records)
        doc["records"].push_back(record_to_json(rec));
    doc["provenance"] = Json::array();
    for (const auto& p : db.provenance)
        doc["provenance"].push_back(
            Json{{"batch_id", p.batch_id}, {"sample_count", p.sample_count}, {"timestamp_s", p.timestamp_s}});
    return doc;
}

ApDatabase db_from_json(const Json& doc) {
    require_version(doc, kDbVersion, "AP database");
    ApDatabase db;
    db.building_id = string_field(doc, "building_id", "");
    if (!doc.contains("records") || !doc["records"].is_array())
        throw Error(ErrorCode::ParseError, "AP database without a records array");
    for (const auto& r : doc["records"]) {
        ApRecord rec = record_from_json(r);
        if (!db.records.emplace(rec.bssid, rec).second)
            throw Error(ErrorCode::InvariantViolation, "duplicate bssid " + rec.bssid);
    }
    if (doc.contains("provenance")) {
        for (const auto& p : doc["provenance"]) {
            ProvenanceEntry e;
            e.batch_id = string_field(p, "batch_id", "provenance: ");
            e.sample_count = static_cast<std::size_t>(number_field(p, "sample_count", "provenance: "));
            e.timestamp_s = number_field(p, "timestamp_s", "provenance: ");
            db.provenance.push_back(std::move(e));
        }
    }
    return db;
}

void save_db(const fs::path& path, const ApDatabase& db) {
    for (const auto& [_, rec] : db.records)
        validate(rec);
    write_text_file(path, db_to_json(db).dump(2) + "\n");
}

ApDatabase load_db(const fs::path& path) { return db_from_json(parse_document(path)); }

ApDatabase merge_db(const ApDatabase& a, const ApDatabase& b) {
    if (a.building_id != b.building_id)
        throw Error(ErrorCode::MergeError, "cannot merge databases of buildings '" + a.building_id +
                                               "' and '" + b.building_id + "'");
    ApDatabase out;
    out.building_id = a.building_id;
    out.records = a.records;
    for (const auto& [bssid, rb] : b.records) {
        auto it = out.records.find(bssid);
        if (it == out.records.end()) {
            out.records.emplace(bssid, rb);
            continue;
        }
        const ApRecord& ra = it->second;
        double wa = static_cast<double>(ra.sample_count);
        double wb = static_cast<double>(rb.sample_count);
        if (wa + wb == 0.0)
            wa = wb = 1.0;
        const double w = wa + wb;
        auto avg = [&](double va, double vb) { return (wa * va + wb * vb) / w; };
        ApRecord m;
        m.bssid = bssid;
        m.position = {avg(ra.position.x, rb.position.x), avg(ra.position.y, rb.position.y)};
        m.offset_ns = std::clamp(avg(ra.offset_ns, rb.offset_ns), kMinOffsetNs, kMaxOffsetNs);
        m.slope_ns_per_m = std::max(avg(ra.slope_ns_per_m, rb.slope_ns_per_m), kRoundTripNsPerM);
        m.sample_count = ra.sample_count + rb.sample_count;
        m.residual_rms_ns = std::sqrt(avg(ra.residual_rms_ns * ra.residual_rms_ns,
                                          rb.residual_rms_ns * rb.residual_rms_ns));
        m.spread_m = std::max(ra.spread_m, rb.spread_m);
        m.low_confidence = ra.low_confidence && rb.low_confidence;
        it->second = m;
    }
    out.provenance = a.provenance;
    out.provenance.insert(out.provenance.end(), b.provenance.begin(), b.provenance.end());
    std::sort(out.provenance.begin(), out.provenance.end(),
              [](const ProvenanceEntry& x, const ProvenanceEntry& y) {
                  return std::tie(x.batch_id, x.timestamp_s, x.sample_count) <
                         std::tie(y.batch_id, y.timestamp_s, y.sample_count);
              });
    return out;
}

// World ----------------------------------------------------------------------

Json world_to_json(const WorldSpec& w) {
    Json doc;
    doc["format"] = "rttloc-world";
    doc["version"] = kWorldVersion;
    doc["name"] = w.name;
    doc["seed"] = w.seed;
    doc["bounds"] = Json{{"min_x_m", w.bounds.min_x},
                         {"min_y_m", w.bounds.min_y},
                         {"max_x_m", w.bounds.max_x},
                         {"max_y_m", w.bounds.max_y}};
    doc["walls"] = Json::array();
    for (const auto& wall : w.walls)
        doc["walls"].push_back(Json{{"x1_m", wall.segment.a.x},
                                    {"y1_m", wall.segment.a.y},
                                    {"x2_m", wall.segment.b.x},
                                    {"y2_m", wall.segment.b.y},
                                    {"attenuation_db", wall.attenuation_db},
                                    {"excess_delay_ns", wall.excess_delay_ns}});
    doc["aps"] = Json::array();
    for (const auto& ap : w.aps)
        doc["aps"].push_back(Json{{"bssid", ap.bssid},
                                  {"x_m", ap.position.x},
                                  {"y_m", ap.position.y},
                                  {"offset_ns", ap.offset_ns},
                                  {"nlos_slope_ns_per_m", ap.nlos_slope_ns_per_m},
                                  {"tx_rssi_dbm_at_1m", ap.tx_rssi_dbm_at_1m}});
    doc["entrances"] = Json::array();
    for (const auto& e : w.entrances)
        doc["entrances"].push_back(position_to_json(e));
    const auto& m = w.measurement;
    doc["measurement"] = Json{{"rate_hz", m.rate_hz},
                              {"rssi_cutoff_dbm", m.rssi_cutoff_dbm},
                              {"clock_hz", m.clock_hz},
                              {"noise_sigma_ns", m.noise_sigma_ns},
                              {"path_loss_exponent", m.path_loss_exponent},
                              {"wall_attenuation", m.wall_attenuation},
                              {"nlos_slope", m.nlos_slope},
                              {"wall_excess_delay", m.wall_excess_delay},
                              {"quantize", m.quantize},
                              {"sample_margin_m", m.sample_margin_m}};
    const auto& p = w.pdr;
    doc["pdr"] = Json{{"speed_m_s", p.speed_m_s},
                      {"heading_drift_deg_per_sqrt_m", p.heading_drift_deg_per_sqrt_m},
                      {"step_scale_sigma", p.step_scale_sigma},
                      {"gps_sigma_m", p.gps_sigma_m},
                      {"indoor_truncation_m", p.indoor_truncation_m},
                      {"waypoint_rate_hz", p.waypoint_rate_hz},
                      {"outdoor_lead_m", p.outdoor_lead_m}};
    return doc;
}

WorldSpec world_from_json(const Json& doc) {
    require_version(doc, kWorldVersion, "world");
    WorldSpec w;
    w.name = doc.value("name", std::string("custom"));
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned())
            throw Error(ErrorCode::ParseError, "world seed must be a non-negative integer");
        w.seed = doc["seed"].get<std::uint64_t>();
    }
    if (!doc.contains("bounds"))
        throw Error(ErrorCode::ParseError, "world without bounds");
    const Json& b = doc["bounds"];
    w.bounds = {number_field(b, "min_x_m", "bounds: "), number_field(b, "min_y_m", "bounds: "),
                number_field(b, "max_x_m", "bounds: "), number_field(b, "max_y_m", "bounds: ")};
    for (const auto& j : doc.value("walls", Json::array()))
        w.walls.push_back({{{number_field(j, "x1_m", "wall: "), number_field(j, "y1_m", "wall: ")},
                            {number_field(j, "x2_m", "wall: "), number_field(j, "y2_m", "wall: ")}},
                           optional_number(j, "attenuation_db", 0.0),
                           optional_number(j, "excess_delay_ns", 0.0)});
    for (const auto& j : doc.value("aps", Json::array())) {
        TrueAp ap;
        ap.bssid = canonical_bssid(string_field(j, "bssid", "ap: "));
        ap.position = position_from_json(j);
        ap.offset_ns = number_field(j, "offset_ns", "ap: ");
        ap.nlos_slope_ns_per_m = optional_number(j, "nlos_slope_ns_per_m", kRoundTripNsPerM);
        ap.tx_rssi_dbm_at_1m = optional_number(j, "tx_rssi_dbm_at_1m", ap.tx_rssi_dbm_at_1m);
        w.aps.push_back(std::move(ap));
    }
    for (const auto& j : doc.value("entrances", Json::array()))
        w.entrances.push_back(position_from_json(j));
    if (doc.contains("measurement")) {
        const Json& j = doc["measurement"];
        auto& m = w.measurement;
        m.rate_hz = optional_number(j, "rate_hz", m.rate_hz);
        m.rssi_cutoff_dbm = optional_number(j, "rssi_cutoff_dbm", m.rssi_cutoff_dbm);
        m.clock_hz = optional_number(j, "clock_hz", m.clock_hz);
        m.noise_sigma_ns = optional_number(j, "noise_sigma_ns", m.noise_sigma_ns);
        m.path_loss_exponent = optional_number(j, "path_loss_exponent", m.path_loss_exponent);
        m.wall_attenuation = bool_field(j, "wall_attenuation", m.wall_attenuation);
        m.nlos_slope = bool_field(j, "nlos_slope", m.nlos_slope);
        m.wall_excess_delay = bool_field(j, "wall_excess_delay", m.wall_excess_delay);
        m.quantize = bool_field(j, "quantize", m.quantize);
        m.sample_margin_m = optional_number(j, "sample_margin_m", m.sample_margin_m);
    }
    if (doc.contains("pdr")) {
        const Json& j = doc["pdr"];
        auto& p = w.pdr;
        p.speed_m_s = optional_number(j, "speed_m_s", p.speed_m_s);
        p.heading_drift_deg_per_sqrt_m =
            optional_number(j, "heading_drift_deg_per_sqrt_m", p.heading_drift_deg_per_sqrt_m);
        p.step_scale_sigma = optional_number(j, "step_scale_sigma", p.step_scale_sigma);
        p.gps_sigma_m = optional_number(j, "gps_sigma_m", p.gps_sigma_m);
        p.indoor_truncation_m = optional_number(j, "indoor_truncation_m", p.indoor_truncation_m);
        p.waypoint_rate_hz = optional_number(j, "waypoint_rate_hz", p.waypoint_rate_hz);
        p.outdoor_lead_m = optional_number(j, "outdoor_lead_m", p.outdoor_lead_m);
    }
    std::sort(w.aps.begin(), w.aps.end(),
              [](const TrueAp& x, const TrueAp& y) { return x.bssid < y.bssid; });
    validate(w);
    return w;
}

void save_world(const fs::path& path, const WorldSpec& world) {
    write_text_file(path, world_to_json(world).dump(2) + "\n");
}

WorldSpec load_world(const fs::path& path) { return world_from_json(parse_document(path)); }

// Helpers --------------------------------------------------------------------

void write_text_file(const fs::path& path, std::string_view content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::IoError, "cannot write " + path.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw Error(ErrorCode::IoError, "short write to " + path.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec)
        throw Error(ErrorCode::IoError, "cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace rttloc
