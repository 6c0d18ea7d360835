// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "risd2d/channel.hpp"
#include "risd2d/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

namespace risd2d {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct Quantity {
  double value = 0.0;
  std::string unit;  // lower-cased, empty when absent
};

Quantity parse_quantity(const std::string& key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin) throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
  return {value, lower(trim(end))};
}

double parse_power(const std::string& key, const std::string& text) {
  const Quantity q = parse_quantity(key, text);
  if (q.unit == "dbm") return dbm_to_watt(q.value);
  if (q.unit == "w") return q.value;
  if (q.unit == "mw") return q.value * 1e-3;
  throw ConfigError("config key '" + key + "': power needs a unit suffix (dBm, W or mW), got '" + text + "'");
}

double parse_plain(const std::string& key, const std::string& text) {
  const Quantity q = parse_quantity(key, text);
  if (!q.unit.empty()) throw ConfigError("config key '" + key + "': unexpected unit '" + q.unit + "'");
  return q.value;
}

double parse_db(const std::string& key, const std::string& text) {
  const Quantity q = parse_quantity(key, text);
  if (q.unit.empty() || q.unit == "db") return q.value;
  throw ConfigError("config key '" + key + "': expected dB, got '" + q.unit + "'");
}

double parse_rate(const std::string& key, const std::string& text) {
  const Quantity q = parse_quantity(key, text);
  if (q.unit.empty() || q.unit == "bps/hz") return q.value;
  throw ConfigError("config key '" + key + "': expected bps/Hz, got '" + q.unit + "'");
}

double parse_sinr(const std::string& key, const std::string& text) {
  const Quantity q = parse_quantity(key, text);
  if (q.unit.empty()) return q.value;
  if (q.unit == "db") return std::pow(10.0, q.value / 10.0);
  throw ConfigError("config key '" + key + "': expected a linear value or dB, got '" + q.unit + "'");
}

double parse_frequency(const std::string& key, const std::string& text) {
  const Quantity q = parse_quantity(key, text);
  if (q.unit.empty() || q.unit == "hz") return q.value;
  if (q.unit == "khz") return q.value * 1e3;
  if (q.unit == "mhz") return q.value * 1e6;
  throw ConfigError("config key '" + key + "': expected Hz, kHz or MHz, got '" + q.unit + "'");
}

int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_plain(key, text);
  if (v != std::floor(v)) throw ConfigError("config key '" + key + "': expected an integer");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string v = lower(text);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + text + "'");
}

nlohmann::json parse_json(const std::string& key, const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

Point parse_point(const std::string& key, const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("config key '" + key + "': expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Point> parse_points(const std::string& key, const std::string& text) {
  const nlohmann::json j = parse_json(key, text);
  if (!j.is_array()) throw ConfigError("config key '" + key + "': expected a list of [x, y]");
  std::vector<Point> out;
  for (const auto& item : j) out.push_back(parse_point(key, item));
  return out;
}

}  // namespace

SystemConfig parse_config(const std::string& text, SystemConfig cfg) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int cu_count = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "ris_elements" || key == "m") cfg.ris_elements = parse_int(key, value);
    else if (key == "phase_bits" || key == "b") cfg.phase_bits = parse_int(key, value);
    else if (key == "cell_radius") cfg.cell_radius = parse_quantity(key, value).value;
    else if (key == "cluster_radius") cfg.cluster_radius = parse_quantity(key, value).value;
    else if (key == "p_max") cfg.p_max_d2d = cfg.p_max_cu = parse_power(key, value);
    else if (key == "p_max_d2d") cfg.p_max_d2d = parse_power(key, value);
    else if (key == "p_max_cu") cfg.p_max_cu = parse_power(key, value);
    else if (key == "r_min") cfg.gamma_min_d2d = cfg.gamma_min_cu = rate_to_sinr(parse_rate(key, value));
    else if (key == "r_min_d2d") cfg.gamma_min_d2d = rate_to_sinr(parse_rate(key, value));
    else if (key == "r_min_cu") cfg.gamma_min_cu = rate_to_sinr(parse_rate(key, value));
    else if (key == "gamma_min_d2d") cfg.gamma_min_d2d = parse_sinr(key, value);
    else if (key == "gamma_min_cu") cfg.gamma_min_cu = parse_sinr(key, value);
    else if (key == "noise_power") cfg.noise_power = parse_power(key, value);
    else if (key == "circuit_power") cfg.circuit_power = parse_power(key, value);
    else if (key == "path_loss_ref") cfg.path_loss_ref = parse_plain(key, value);
    else if (key == "ple_direct") cfg.ple_direct = parse_plain(key, value);
    else if (key == "ple_ris_bs") cfg.ple_ris_bs = parse_plain(key, value);
    else if (key == "ple_ris_other") cfg.ple_ris_other = parse_plain(key, value);
    else if (key == "rician") {
      cfg.rician_tx_ris = cfg.rician_cu_ris = cfg.rician_ris_rx = cfg.rician_ris_bs = parse_plain(key, value);
    }
    else if (key == "rician_tx_ris") cfg.rician_tx_ris = parse_plain(key, value);
    else if (key == "rician_cu_ris") cfg.rician_cu_ris = parse_plain(key, value);
    else if (key == "rician_ris_rx") cfg.rician_ris_rx = parse_plain(key, value);
    else if (key == "rician_ris_bs") cfg.rician_ris_bs = parse_plain(key, value);
    else if (key == "ris_element_gain") cfg.ris_element_gain_db = parse_db(key, value);
    else if (key == "apply_element_gain") cfg.apply_element_gain = parse_bool(key, value);
    else if (key == "element_spacing") cfg.element_spacing = parse_plain(key, value);
    else if (key == "fpga_power") cfg.fpga_power = parse_power(key, value);
    else if (key == "dac_sampling") cfg.dac_sampling_hz = parse_frequency(key, value);
    else if (key == "varactor_power_w") {
      const nlohmann::json j = parse_json(key, value);
      if (!j.is_array()) throw ConfigError("config key '" + key + "': expected a list of watts");
      cfg.varactor_power.clear();
      for (const auto& v : j) cfg.varactor_power.push_back(v.get<double>());
    }
    else if (key == "bs") cfg.bs = parse_point(key, parse_json(key, value));
    else if (key == "ris") cfg.ris = parse_point(key, parse_json(key, value));
    else if (key == "cu_positions") cfg.cu_positions = parse_points(key, value);
    else if (key == "spare_cu_positions") cfg.spare_cu_positions = parse_points(key, value);
    else if (key == "d2d_tx_positions") cfg.d2d_tx_positions = parse_points(key, value);
    else if (key == "d2d_rx_positions") cfg.d2d_rx_positions = parse_points(key, value);
    else if (key == "num_cu") cu_count = parse_int(key, value);
    else if (key == "rng_seed" || key == "seed") {
      const double v = parse_plain(key, value);
      if (v < 0 || v != std::floor(v)) throw ConfigError("config key 'rng_seed': expected a non-negative integer");
      cfg.rng_seed = static_cast<std::uint64_t>(v);
    }
    else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  if (cu_count > 0) set_cu_count(cfg, cu_count);
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::filesystem::path& path, SystemConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

}  // namespace risd2d
