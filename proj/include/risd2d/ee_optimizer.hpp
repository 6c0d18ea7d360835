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

#include "risd2d/se_optimizer.hpp"

#include <vector>

namespace risd2d {

/// Power drawn by the RIS controller and its elements.
struct RisPowerModel {
  double fpga_power = 0.0;     // W
  double sampling_hz = 0.0;    // DAC sampling rate
  std::vector<double> varactor_power;  // W per element, indexed by B-1
  int bits = 1;
  int elements = 1;
};

RisPowerModel ris_power_model(const SystemConfig& cfg);

/// 1.5e-5 · 2^B + 9e-12 · B · f_s watts.
double dac_power(int bits, double sampling_hz);

/// P_FPGA + M·(P_DAC(B) + P_v(B)). Throws RangeError for B outside [1, 10]
/// or outside the varactor table.
double ris_power(const RisPowerModel& model);

/// Σ_k P_k^c + Σ_{n∈D} P_n^d + (K + 2N + 1)·P₀ + ris_watts.
double total_power(const Allocation& alloc, const Pairing& pairing, const SystemConfig& cfg, double ris_watts);

/// Sum rate over total power, bps/Joule/Hz, with the RIS drawing ris_watts.
double ee_value(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                const SystemConfig& cfg, double ris_watts);
/// Same with the RIS power taken from cfg.
double ee_value(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                const SystemConfig& cfg);

/// Parametric iterates of one Dinkelbach solve.
struct DinkelbachTrace {
  std::vector<double> lambda;    // λ used for each parametric solve
  std::vector<double> residual;  // max_p R^lb(p) - λ·P(p) at that λ
};

/// Maximizes R^lb(p) / P(p) over the power box and SINR floors with θ fixed,
/// the lower bound expanded at alloc.p. Stops once the parametric optimum
/// falls below settings.dinkelbach_delta. Throws InfeasibleError when the
/// floors cannot be met.
RVec dinkelbach_power_step(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                           const SystemConfig& cfg, double ris_watts, const SolverSettings& settings = {},
                           DinkelbachTrace* trace = nullptr);

/// Alternating Dinkelbach power steps and beamforming steps under RCS pairing.
SolveReport maximize_ee(const ChannelRealization& ch, const SystemConfig& cfg, FeasibleSet set,
                        const SolverSettings& settings = {});
SolveReport maximize_ee(const ChannelRealization& ch, const SystemConfig& cfg, FeasibleSet set,
                        const Pairing& pairing, const SolverSettings& settings = {});

}  // namespace risd2d
