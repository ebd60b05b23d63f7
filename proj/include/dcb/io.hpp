#pragma once

// JSON scenario and parameter files, CSV output helpers.

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcb/channelization.hpp"
#include "dcb/ctmc.hpp"
#include "dcb/error.hpp"
#include "dcb/mac_phy.hpp"

namespace dcb {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Model parameters

struct ModelParams {
  MacPhyParams mac;
  DurationTable table = DurationTable::ieee80211ac();
  FittedActivityModel fit;

  ActivityModel model() const { return ActivityModel(mac, table); }
};

namespace detail {

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::ParseError, where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw Error(ErrorCode::ParseError, where + ": unknown key \"" + key + "\"");
    }
  }
}

template <typename T>
T field(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, where + "." + key + ": " + e.what());
  }
}

inline json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, source + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Overrides the fields present in `j`; everything else keeps its value.
inline void apply_params(const json& j, ModelParams& p, const std::string& where = "parameters") {
  detail::reject_unknown(j,
                         {"packet_length_bits", "aggregated_packets", "contention_window_slots",
                          "slot_duration_us", "packet_error_prob", "duration_table_ms", "fit"},
                         where);
  using detail::field;
  if (j.contains("packet_length_bits"))
    p.mac.packet_length_bits = field<double>(j, "packet_length_bits", where);
  if (j.contains("aggregated_packets"))
    p.mac.aggregated_packets = field<int>(j, "aggregated_packets", where);
  if (j.contains("contention_window_slots"))
    p.mac.contention_window = field<int>(j, "contention_window_slots", where);
  if (j.contains("slot_duration_us"))
    p.mac.slot_duration = field<double>(j, "slot_duration_us", where) * 1e-6;
  if (j.contains("packet_error_prob"))
    p.mac.packet_error_prob = field<double>(j, "packet_error_prob", where);
  if (j.contains("duration_table_ms")) {
    const auto& t = j.at("duration_table_ms");
    if (!t.is_object()) {
      throw Error(ErrorCode::ParseError, where + ".duration_table_ms: expected an object");
    }
    std::map<int, double> seconds;
    for (const auto& [key, value] : t.items()) {
      int width = 0;
      try {
        std::size_t used = 0;
        width = std::stoi(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError,
                    where + ".duration_table_ms: key \"" + key + "\" is not a channel count");
      }
      if (!value.is_number()) {
        throw Error(ErrorCode::ParseError,
                    where + ".duration_table_ms." + key + ": expected a number");
      }
      seconds[width] = value.get<double>() * 1e-3;
    }
    try {
      p.table = DurationTable(std::move(seconds));
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, where + ".duration_table_ms: " + e.what());
    }
  }
  if (j.contains("fit")) {
    const auto& f = j.at("fit");
    detail::reject_unknown(f, {"a", "b"}, where + ".fit");
    if (f.contains("a")) p.fit.a = field<double>(f, "a", where + ".fit");
    if (f.contains("b")) p.fit.b = field<double>(f, "b", where + ".fit");
  }
  try {
    p.mac.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, where + ": " + e.what());
  }
}

inline ModelParams load_params_file(const std::string& path, ModelParams base = {}) {
  apply_params(detail::parse_json_text(detail::read_file(path), path), base, path);
  return base;
}

// ---------------------------------------------------------------------------
// Scenarios

struct WlanSpec {
  std::string name;
  std::string allocation;  // literal, e.g. "1~2,3,4"
  std::optional<double> attempt_rate;  // 1/s, overrides 1/E[B]
  std::optional<double> payload_bits;  // overrides K_A * L_d
};

struct Scenario {
  std::string name;
  ChannelGrid grid{4};
  BondingMode mode = BondingMode::aligned;
  ModelParams params;
  std::vector<WlanSpec> wlans;

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& w : wlans) out.push_back(w.name);
    return out;
  }

  NetworkAllocation network() const {
    std::vector<WlanAllocation> allocs;
    for (const auto& w : wlans) allocs.push_back(parse_allocation(w.allocation, grid, mode));
    return NetworkAllocation(grid, std::move(allocs), mode);
  }

  Traffic traffic() const {
    const ActivityModel base = params.model();
    Traffic out;
    for (const auto& w : wlans) {
      ActivityModel m = base;
      if (w.attempt_rate) m = m.with_attempt_rate(*w.attempt_rate);
      if (w.payload_bits) m = m.with_payload(*w.payload_bits);
      out.push_back(std::move(m));
    }
    return out;
  }
};

inline Scenario parse_scenario(const json& j, const std::string& source = "scenario") {
  detail::reject_unknown(j, {"name", "channels", "bonding", "parameters", "wlans"}, source);
  using detail::field;
  Scenario s;
  if (j.contains("name")) s.name = field<std::string>(j, "name", source);
  if (!j.contains("channels")) throw Error(ErrorCode::ParseError, source + ": missing \"channels\"");
  const int k = field<int>(j, "channels", source);
  if (k < 1 || k > kMaxChannels) {
    throw Error(ErrorCode::ParseError, source + ".channels: must be in 1.." +
                                           std::to_string(kMaxChannels));
  }
  s.grid = ChannelGrid(k);
  if (j.contains("bonding")) {
    const auto mode = field<std::string>(j, "bonding", source);
    if (mode == "aligned") {
      s.mode = BondingMode::aligned;
    } else if (mode == "contiguous") {
      s.mode = BondingMode::contiguous;
    } else {
      throw Error(ErrorCode::ParseError,
                  source + ".bonding: expected \"aligned\" or \"contiguous\", got \"" + mode + "\"");
    }
  }
  if (j.contains("parameters")) apply_params(j.at("parameters"), s.params, source + ".parameters");
  if (!j.contains("wlans") || !j.at("wlans").is_array()) {
    throw Error(ErrorCode::ParseError, source + ": \"wlans\" must be an array");
  }
  const auto& list = j.at("wlans");
  if (list.empty()) throw Error(ErrorCode::ParseError, source + ".wlans: no WLANs given");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = source + ".wlans[" + std::to_string(i) + "]";
    const auto& w = list[i];
    detail::reject_unknown(w, {"name", "allocation", "attempt_rate", "payload_bits"}, where);
    WlanSpec spec;
    spec.name = w.contains("name") ? field<std::string>(w, "name", where) : default_wlan_name(i);
    if (!seen.insert(spec.name).second) {
      throw Error(ErrorCode::ParseError, where + ".name: duplicate name \"" + spec.name + "\"");
    }
    if (!w.contains("allocation")) throw Error(ErrorCode::ParseError, where + ": missing \"allocation\"");
    spec.allocation = field<std::string>(w, "allocation", where);
    try {
      parse_allocation(spec.allocation, s.grid, s.mode);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, where + ".allocation: " + e.what());
    }
    if (w.contains("attempt_rate")) {
      spec.attempt_rate = field<double>(w, "attempt_rate", where);
      if (!(*spec.attempt_rate > 0))
        throw Error(ErrorCode::ParseError, where + ".attempt_rate: must be positive");
    }
    if (w.contains("payload_bits")) {
      spec.payload_bits = field<double>(w, "payload_bits", where);
      if (!(*spec.payload_bits > 0))
        throw Error(ErrorCode::ParseError, where + ".payload_bits: must be positive");
    }
    s.wlans.push_back(std::move(spec));
  }
  return s;
}

inline Scenario parse_scenario_text(const std::string& text, const std::string& source = "scenario") {
  return parse_scenario(detail::parse_json_text(text, source), source);
}

inline Scenario load_scenario_file(const std::string& path) {
  return parse_scenario_text(detail::read_file(path), path);
}

// ---------------------------------------------------------------------------
// CSV

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Stationary probabilities span many orders of magnitude.
inline std::string sci6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_field(fields[i]);
  }
  out << '\n';
}

/// "2;2.500000;2.500000": integers bare, everything else at 6 decimals.
inline std::string format_scheme(const std::vector<double>& scheme) {
  std::string out;
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    if (i) out += ';';
    const double r = std::round(scheme[i]);
    out += std::abs(scheme[i] - r) <= 1e-9 ? std::to_string(static_cast<long>(r)) : fixed6(scheme[i]);
  }
  return out;
}

inline std::string format_scheme(const std::vector<int>& scheme) {
  return format_scheme(std::vector<double>(scheme.begin(), scheme.end()));
}

inline double to_mbps(double bits_per_second) { return bits_per_second / 1e6; }

}  // namespace dcb
