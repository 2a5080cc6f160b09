#include "bernloc/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include <fmt/format.h>

namespace bernloc {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& raw, int line, const std::string& key) {
  const std::string v = trim(raw);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(line, "key '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

Eigen::Vector2d parse_pair(const std::string& raw, int line, const std::string& key) {
  const auto comma = raw.find(',');
  if (comma == std::string::npos || raw.find(',', comma + 1) != std::string::npos) {
    throw ConfigError(line, "key '" + key + "': expected two comma-separated numbers");
  }
  return {parse_double(raw.substr(0, comma), line, key), parse_double(raw.substr(comma + 1), line, key)};
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(line, "key '" + key + "': expected true or false, got '" + v + "'");
}

std::uint64_t parse_u64(const std::string& v, int line, const std::string& key) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(line, "key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

using Setter = std::function<void(MissionConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"target_pos", [](MissionConfig& c, const std::string& v, int l) { c.target_pos = parse_pair(v, l, "target_pos"); }},
      {"vehicle_start", [](MissionConfig& c, const std::string& v, int l) { c.vehicle_start = parse_pair(v, l, "vehicle_start"); }},
      {"zeta_min", [](MissionConfig& c, const std::string& v, int l) { c.zeta_min = parse_double(v, l, "zeta_min"); }},
      {"zeta_max", [](MissionConfig& c, const std::string& v, int l) { c.zeta_max = parse_double(v, l, "zeta_max"); }},
      {"sample_rate_hz", [](MissionConfig& c, const std::string& v, int l) { c.sample_rate_hz = parse_double(v, l, "sample_rate_hz"); }},
      {"replan_interval_s", [](MissionConfig& c, const std::string& v, int l) { c.replan_interval_s = parse_double(v, l, "replan_interval_s"); }},
      {"r_t_m", [](MissionConfig& c, const std::string& v, int l) { c.r_t = parse_double(v, l, "r_t_m"); }},
      {"tf_max_s", [](MissionConfig& c, const std::string& v, int l) { c.tf_max = parse_double(v, l, "tf_max_s"); }},
      {"channel.P", [](MissionConfig& c, const std::string& v, int l) { c.channel.P = parse_double(v, l, "channel.P"); }},
      {"channel.n_exp", [](MissionConfig& c, const std::string& v, int l) { c.channel.n_exp = parse_double(v, l, "channel.n_exp"); }},
      {"channel.noise_model",
       [](MissionConfig& c, const std::string& v, int l) {
         if (v == "constant") c.channel.noise_model = NoiseModel::kConstant;
         else if (v == "distance_scaled") c.channel.noise_model = NoiseModel::kDistanceScaled;
         else throw ConfigError(l, "key 'channel.noise_model': expected constant or distance_scaled, got '" + v + "'");
       }},
      {"channel.sigma0", [](MissionConfig& c, const std::string& v, int l) { c.channel.noise_sigma0 = parse_double(v, l, "channel.sigma0"); }},
      {"channel.noise_ref_range", [](MissionConfig& c, const std::string& v, int l) { c.channel.noise_ref_range = parse_double(v, l, "channel.noise_ref_range"); }},
      {"w1", [](MissionConfig& c, const std::string& v, int l) { c.weights.time = parse_double(v, l, "w1"); }},
      {"w2", [](MissionConfig& c, const std::string& v, int l) { c.weights.effort = parse_double(v, l, "w2"); }},
      {"w3", [](MissionConfig& c, const std::string& v, int l) { c.weights.terminal = parse_double(v, l, "w3"); }},
      {"w4", [](MissionConfig& c, const std::string& v, int l) { c.weights.information = parse_double(v, l, "w4"); }},
      {"v_max", [](MissionConfig& c, const std::string& v, int l) { c.v_max = parse_double(v, l, "v_max"); }},
      {"degree_d",
       [](MissionConfig& c, const std::string& v, int l) {
         const auto d = parse_u64(v, l, "degree_d");
         if (d > 1000) throw ConfigError(l, "key 'degree_d': value too large");
         c.degree = int(d);
       }},
      {"rng_seed", [](MissionConfig& c, const std::string& v, int l) { c.rng_seed = parse_u64(v, l, "rng_seed"); }},
      {"fim_enabled", [](MissionConfig& c, const std::string& v, int l) { c.fim_enabled = parse_bool(v, l, "fim_enabled"); }},
  };
  return table;
}

const std::vector<std::string> kRequired = {"target_pos", "vehicle_start", "zeta_min", "zeta_max"};

}  // namespace

MissionConfig parse_config(const std::string& text) {
  MissionConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(line, "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(line, "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(line, "key '" + key + "' has no value");
    it->second(config, value, line);
  }
  for (const auto& key : kRequired) {
    if (!seen.count(key)) throw ConfigError(0, "missing required key '" + key + "'");
  }
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, std::string("invalid configuration: ") + e.what());
  }
  return config;
}

MissionConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const MissionConfig& c) {
  std::string out;
  auto put = [&out](const std::string& key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  auto num = [](double v) { return fmt::format("{}", v); };  // shortest round-trip form
  auto pair = [&num](const Eigen::Vector2d& v) { return num(v.x()) + ", " + num(v.y()); };
  put("target_pos", pair(c.target_pos));
  put("vehicle_start", pair(c.vehicle_start));
  put("zeta_min", num(c.zeta_min));
  put("zeta_max", num(c.zeta_max));
  put("sample_rate_hz", num(c.sample_rate_hz));
  put("replan_interval_s", num(c.replan_interval_s));
  put("r_t_m", num(c.r_t));
  put("tf_max_s", num(c.tf_max));
  put("channel.P", num(c.channel.P));
  put("channel.n_exp", num(c.channel.n_exp));
  put("channel.noise_model", c.channel.noise_model == NoiseModel::kConstant ? "constant" : "distance_scaled");
  put("channel.sigma0", num(c.channel.noise_sigma0));
  put("channel.noise_ref_range", num(c.channel.noise_ref_range));
  put("w1", num(c.weights.time));
  put("w2", num(c.weights.effort));
  put("w3", num(c.weights.terminal));
  put("w4", num(c.weights.information));
  put("v_max", num(c.v_max));
  put("degree_d", std::to_string(c.degree));
  put("rng_seed", std::to_string(c.rng_seed));
  put("fim_enabled", c.fim_enabled ? "true" : "false");
  return out;
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace bernloc
