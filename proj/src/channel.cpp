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

#include <cmath>
#include <numbers>
#include <string>

namespace risd2d {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

double rate_to_sinr(double bps_per_hz) { return std::exp2(bps_per_hz) - 1.0; }

double path_loss(double distance_m, double ple, double reference) {
  if (!(distance_m > 0.0))
    throw DomainError("path_loss: distance must be positive, got " + std::to_string(distance_m));
  return reference * std::pow(distance_m, -ple);
}

void SystemConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid config: ") + what);
  };
  require(ris_elements >= 1, "ris_elements must be >= 1");
  require(phase_bits >= 1 && phase_bits <= 10, "phase_bits must be in [1, 10]");
  require(num_cu() >= 1, "at least one CU is required");
  require(num_d2d() >= 1, "at least one D2D pair is required");
  require(d2d_rx_positions.size() == d2d_tx_positions.size(), "D2D TX and RX counts differ");
  require(num_cu() >= num_d2d(), "the CU count must be at least the D2D pair count");
  require(cell_radius > 0.0 && cluster_radius > 0.0, "radii must be positive");
  require(p_max_d2d > 0.0 && p_max_cu > 0.0, "maximum transmit powers must be positive");
  require(noise_power > 0.0, "noise power must be positive");
  require(circuit_power > 0.0, "circuit power must be positive");
  require(gamma_min_d2d >= 0.0 && gamma_min_cu >= 0.0, "SINR floors must be non-negative");
  require(path_loss_ref > 0.0, "path-loss reference must be positive");
  require(ple_direct > 0.0 && ple_ris_bs > 0.0 && ple_ris_other > 0.0, "path-loss exponents must be positive");
  require(rician_tx_ris >= 0.0 && rician_cu_ris >= 0.0 && rician_ris_rx >= 0.0 && rician_ris_bs >= 0.0,
          "Rician factors must be non-negative");
  require(element_spacing > 0.0, "element spacing must be positive");
  require(fpga_power >= 0.0 && dac_sampling_hz >= 0.0, "RIS power parameters must be non-negative");
  require(varactor_power.size() >= 10, "varactor power table must cover B = 1..10");
  for (double p : varactor_power) require(p >= 0.0, "varactor power entries must be non-negative");
}

ChannelRealization ChannelRealization::without_ris() const {
  ChannelRealization out = *this;
  for (auto& v : out.tx_ris) v.setZero();
  for (auto& v : out.cu_ris) v.setZero();
  for (auto& v : out.ris_rx) v.setZero();
  out.ris_bs.setZero();
  return out;
}

CVec los_steering(const SystemConfig& cfg, const Point& target) {
  const double d = distance(cfg.ris, target);
  if (!(d > 0.0)) throw DomainError("los_steering: target coincides with the RIS");
  const double sin_angle = (target.x - cfg.ris.x) / d;
  const double step = 2.0 * std::numbers::pi * cfg.element_spacing * sin_angle;
  CVec a(cfg.ris_elements);
  for (int m = 0; m < cfg.ris_elements; ++m) a[m] = std::polar(1.0, step * m);
  return a;
}

namespace {

cplx complex_normal(Rng& rng, double variance) {
  std::normal_distribution<double> n01;
  const double scale = std::sqrt(variance / 2.0);
  const double re = n01(rng);
  const double im = n01(rng);
  return {scale * re, scale * im};
}

// The element gain rides on the incident hop only, so each cascaded
// transmitter-RIS-receiver path picks it up exactly once.
CVec rician_vector(const SystemConfig& cfg, Rng& rng, const Point& node, double ple, double k_factor, bool incident) {
  const double gain =
      incident && cfg.apply_element_gain ? std::pow(10.0, cfg.ris_element_gain_db / 10.0) : 1.0;
  const double amplitude = std::sqrt(path_loss(distance(cfg.ris, node), ple, cfg.path_loss_ref) * gain);
  const CVec los = los_steering(cfg, node);
  CVec out(cfg.ris_elements);
  if (std::isinf(k_factor)) {
    for (int m = 0; m < cfg.ris_elements; ++m) {
      complex_normal(rng, 1.0);  // keep the stream aligned with finite K
      out[m] = amplitude * los[m];
    }
    return out;
  }
  const double w_los = std::sqrt(k_factor / (k_factor + 1.0));
  const double w_nlos = std::sqrt(1.0 / (k_factor + 1.0));
  for (int m = 0; m < cfg.ris_elements; ++m) {
    out[m] = amplitude * (w_los * los[m] + w_nlos * complex_normal(rng, 1.0));
  }
  return out;
}

cplx rayleigh(const SystemConfig& cfg, Rng& rng, const Point& a, const Point& b) {
  return complex_normal(rng, path_loss(distance(a, b), cfg.ple_direct, cfg.path_loss_ref));
}

}  // namespace

ChannelRealization draw_realization(const SystemConfig& cfg, Rng& rng) {
  cfg.validate();
  const int n = cfg.num_d2d();
  const int k = cfg.num_cu();
  ChannelRealization ch;

  ch.d2d.resize(n, n);
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) ch.d2d(l, i) = rayleigh(cfg, rng, cfg.d2d_tx_positions[i], cfg.d2d_rx_positions[l]);
  }
  for (int i = 0; i < n; ++i) {
    ch.tx_ris.push_back(rician_vector(cfg, rng, cfg.d2d_tx_positions[i], cfg.ple_ris_other, cfg.rician_tx_ris, true));
  }
  ch.cu_bs.resize(k);
  for (int c = 0; c < k; ++c) ch.cu_bs[c] = rayleigh(cfg, rng, cfg.cu_positions[c], cfg.bs);
  for (int c = 0; c < k; ++c) {
    ch.cu_ris.push_back(rician_vector(cfg, rng, cfg.cu_positions[c], cfg.ple_ris_other, cfg.rician_cu_ris, true));
  }
  for (int l = 0; l < n; ++l) {
    ch.ris_rx.push_back(rician_vector(cfg, rng, cfg.d2d_rx_positions[l], cfg.ple_ris_other, cfg.rician_ris_rx, false));
  }
  ch.ris_bs = rician_vector(cfg, rng, cfg.bs, cfg.ple_ris_bs, cfg.rician_ris_bs, false);
  ch.tx_bs.resize(n);
  for (int i = 0; i < n; ++i) ch.tx_bs[i] = rayleigh(cfg, rng, cfg.d2d_tx_positions[i], cfg.bs);
  ch.cu_rx.resize(n, k);
  for (int l = 0; l < n; ++l) {
    for (int c = 0; c < k; ++c) ch.cu_rx(l, c) = rayleigh(cfg, rng, cfg.cu_positions[c], cfg.d2d_rx_positions[l]);
  }
  return ch;
}

SystemConfig default_topology() {
  SystemConfig cfg;
  cfg.ris_elements = 200;
  cfg.phase_bits = 3;
  cfg.p_max_d2d = dbm_to_watt(24.0);
  cfg.p_max_cu = dbm_to_watt(24.0);
  cfg.gamma_min_d2d = rate_to_sinr(0.3);
  cfg.gamma_min_cu = rate_to_sinr(0.3);
  cfg.noise_power = dbm_to_watt(-114.0);
  cfg.circuit_power = dbm_to_watt(24.0);
  cfg.bs = {0.0, 0.0};
  cfg.ris = {100.0, 0.0};
  cfg.cu_positions = {{38, 54}, {87, 92}, {112, 136}, {155, 89}};
  cfg.d2d_tx_positions = {{97, 28}, {44, 103}};
  cfg.d2d_rx_positions = {{144, 52}, {52, 154}};
  cfg.spare_cu_positions = {{99, 44}, {122, 174}, {138, 162}, {74, 121}, {56, 112}, {149, 78}};
  return cfg;
}

void set_cu_count(SystemConfig& cfg, int count) {
  if (count < 1) throw ConfigError("CU count must be positive");
  std::vector<Point> pool = cfg.cu_positions;
  pool.insert(pool.end(), cfg.spare_cu_positions.begin(), cfg.spare_cu_positions.end());
  if (static_cast<std::size_t>(count) > pool.size()) {
    throw ConfigError("CU count " + std::to_string(count) + " exceeds the " + std::to_string(pool.size()) +
                      " known CU positions");
  }
  cfg.cu_positions.assign(pool.begin(), pool.begin() + count);
  cfg.spare_cu_positions.assign(pool.begin() + count, pool.end());
}

}  // namespace risd2d
