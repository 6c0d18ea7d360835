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

#include "risd2d/ee_optimizer.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace risd2d {

enum class Scheme { Proposed, NoRis, RandomPhase, IdealPairing };
enum class Metric { SE, EE };
enum class Axis { PMax, M, B, RMinCu, Rician, K };

const char* to_string(Scheme scheme);
const char* to_string(Metric metric);
const char* to_string(Axis axis);
Scheme parse_scheme(const std::string& text);
Metric parse_metric(const std::string& text);
Axis parse_axis(const std::string& text);

/// Copy of cfg with one swept parameter set. P_max is given in dBm, the CU
/// rate floor in bps/Hz, the Rician factor is applied to every RIS link.
SystemConfig apply_axis(const SystemConfig& cfg, Axis axis, double value);

/// Runs one scheme on one draw. The proposed and baseline schemes use RCS
/// pairing; if that pairing admits no feasible point, pairings are tried in
/// lexicographic order and the first feasible run is returned.
SolveReport run_scheme(Scheme scheme, const ChannelRealization& ch, const SystemConfig& cfg, Metric metric,
                       FeasibleSet set, const SolverSettings& settings = {});

struct SweepSpec {
  Axis axis = Axis::PMax;
  std::vector<double> values;
  Metric metric = Metric::SE;
  std::vector<Scheme> schemes{Scheme::Proposed};
  int realizations = 200;
  SystemConfig base;
  std::uint64_t seed = 1;
  FeasibleSet feasible_set = FeasibleSet::F1;
  SolverSettings settings;
  int threads = 0;  // 0: hardware concurrency
  std::size_t pairing_cap = 1'000'000;

  /// Throws ConfigError or SizeError.
  void validate() const;
};

struct ResultRow {
  std::string scheme;
  std::string axis;
  double axis_value = 0.0;
  std::string metric;
  double mean = 0.0;  // NaN when no draw was feasible
  double stderr_ = 0.0;
  double feasibility_rate = 0.0;
  double mean_iterations = 0.0;
  int realizations = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Channel stream and solver seed of draw r.
Rng draw_rng(std::uint64_t seed, int draw);
std::uint64_t draw_init_seed(std::uint64_t seed, int draw);

/// Averages each scheme over spec.realizations draws per axis value.
/// Infeasible draws are left out of the mean and counted in the feasibility
/// rate. A draw whose solver throws is logged with its index and seed and
/// counted as infeasible. `on_value` receives all rows finished so far after
/// each axis value.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, std::ostream* log = nullptr,
                                 const std::function<void(const std::vector<ResultRow>&)>& on_value = {});

std::string to_csv(const std::vector<ResultRow>& rows);
std::string to_json(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(const std::string& text);
std::vector<ResultRow> parse_json(const std::string& text);

/// Writes rows as "csv" or "json". Throws std::runtime_error naming the path
/// on IO failure and std::invalid_argument for empty rows or a bad format.
void emit_results(const std::vector<ResultRow>& rows, const std::string& format, const std::filesystem::path& path);

/// 2 when some axis value has no feasible draw under any scheme, else 0.
int sweep_exit_code(const std::vector<ResultRow>& rows);

/// SolveReport as JSON, including the objective trace.
std::string report_json(const SolveReport& report);

}  // namespace risd2d
