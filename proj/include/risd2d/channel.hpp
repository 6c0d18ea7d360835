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

#pragma once

#include "risd2d/numerics.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace risd2d {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);

/// Scenario constants. Powers are in watts, SINR floors are linear, lengths
/// in meters. Path-loss exponents are named `ple_*` to keep them apart from
/// reflecting amplitudes.
struct SystemConfig {
  int ris_elements = 200;  // M
  int phase_bits = 3;      // B

  double cell_radius = 250.0;
  double cluster_radius = 60.0;

  double p_max_d2d = 0.0;
  double p_max_cu = 0.0;
  double gamma_min_d2d = 0.0;
  double gamma_min_cu = 0.0;
  double noise_power = 0.0;
  double circuit_power = 0.0;  // P₀, per transmitter or receiver

  double path_loss_ref = 1e-3;  // C at 1 m
  double ple_direct = 4.0;
  double ple_ris_bs = 2.0;
  double ple_ris_other = 2.2;

  double rician_tx_ris = 10.0;  // K₁
  double rician_cu_ris = 10.0;  // K₂
  double rician_ris_rx = 10.0;  // K₃
  double rician_ris_bs = 10.0;  // K₄

  double ris_element_gain_db = 3.0;
  bool apply_element_gain = true;
  /// Element spacing of the RIS, in wavelengths. The array lies along the
  /// x axis through the RIS position; broadside points along +y.
  double element_spacing = 0.5;

  double fpga_power = 1.188;
  double dac_sampling_hz = 1e4;
  /// Per-diode varactor power indexed by B-1, for B in [1, 10].
  std::vector<double> varactor_power = std::vector<double>(10, 0.0);

  Point bs{0.0, 0.0};
  Point ris{100.0, 0.0};
  std::vector<Point> cu_positions;
  std::vector<Point> d2d_tx_positions;
  std::vector<Point> d2d_rx_positions;
  /// Positions appended, in order, when the CU count is raised above the
  /// number of listed CUs.
  std::vector<Point> spare_cu_positions;

  std::uint64_t rng_seed = 1;

  int num_cu() const { return static_cast<int>(cu_positions.size()); }
  int num_d2d() const { return static_cast<int>(d2d_tx_positions.size()); }

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;
};

/// One draw of every channel coefficient. Vectors have length M.
struct ChannelRealization {
  CMat d2d;                    // h(l, i): TX i -> RX l, N x N
  std::vector<CVec> tx_ris;    // f_i: TX i -> RIS
  CVec cu_bs;                  // h̃_k: CU k -> BS
  std::vector<CVec> cu_ris;    // f̃_k: CU k -> RIS
  std::vector<CVec> ris_rx;    // g_l: RIS -> RX l
  CVec ris_bs;                 // g̃: RIS -> BS
  CVec tx_bs;                  // u_i: TX i -> BS
  CMat cu_rx;                  // v(l, k): CU k -> RX l, N x K

  Eigen::Index ris_elements() const { return ris_bs.size(); }
  int num_d2d() const { return static_cast<int>(d2d.rows()); }
  int num_cu() const { return static_cast<int>(cu_bs.size()); }

  /// Copy with every RIS-related vector set to zero.
  ChannelRealization without_ris() const;
};

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);
/// Linear SINR floor from a rate floor in bps/Hz: 2^R - 1.
double rate_to_sinr(double bps_per_hz);

/// C * d^(-ple). Throws DomainError for d <= 0.
double path_loss(double distance_m, double ple, double reference);

/// Unit-modulus array response toward `target` as seen from the RIS.
CVec los_steering(const SystemConfig& cfg, const Point& target);

using Rng = std::mt19937_64;

/// Draws Rayleigh direct links and Rician RIS links from `rng`. The draw
/// order is fixed, so equal (cfg, rng state) gives bit-identical output.
ChannelRealization draw_realization(const SystemConfig& cfg, Rng& rng);

/// The fixed simulation layout with default parameter settings.
SystemConfig default_topology();

/// Resizes the CU list to `count`, drawing extra positions from
/// spare_cu_positions. Throws ConfigError when not enough positions exist.
void set_cu_count(SystemConfig& cfg, int count);

/// Flat `key = value` config text; see README for the key list. Values may
/// carry a unit suffix (dBm, W, mW, dB, Hz, kHz, bps/Hz); coordinate lists
/// use JSON arrays, e.g. `cu_positions = [[38,54],[87,92]]`.
SystemConfig parse_config(const std::string& text, SystemConfig base = default_topology());
SystemConfig load_config(const std::filesystem::path& path, SystemConfig base = default_topology());

}  // namespace risd2d
