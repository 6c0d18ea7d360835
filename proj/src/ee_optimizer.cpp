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

#include "risd2d/ee_optimizer.hpp"

#include "risd2d/errors.hpp"

#include <cmath>
#include <string>

namespace risd2d {

RisPowerModel ris_power_model(const SystemConfig& cfg) {
  return {cfg.fpga_power, cfg.dac_sampling_hz, cfg.varactor_power, cfg.phase_bits, cfg.ris_elements};
}

double dac_power(int bits, double sampling_hz) {
  return 1.5e-5 * std::exp2(bits) + 9e-12 * bits * sampling_hz;
}

double ris_power(const RisPowerModel& model) {
  if (model.bits < 1 || model.bits > 10)
    throw RangeError("ris_power: phase bits must lie in [1, 10], got " + std::to_string(model.bits));
  if (static_cast<std::size_t>(model.bits) > model.varactor_power.size())
    throw RangeError("ris_power: no varactor power entry for B = " + std::to_string(model.bits));
  const double per_element = dac_power(model.bits, model.sampling_hz) + model.varactor_power[model.bits - 1];
  return model.fpga_power + model.elements * per_element;
}

namespace {

double transmit_power(const RVec& p, const Pairing& pairing) {
  double sum = p.tail(pairing.num_cu()).sum();
  for (int n : pairing.active_set()) sum += p[n];
  return sum;
}

}  // namespace

double total_power(const Allocation& alloc, const Pairing& pairing, const SystemConfig& cfg, double ris_watts) {
  const int transceivers = pairing.num_cu() + 2 * pairing.num_d2d() + 1;
  return transmit_power(alloc.p, pairing) + transceivers * cfg.circuit_power + ris_watts;
}

double ee_value(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                const SystemConfig& cfg, double ris_watts) {
  return sum_rate(alloc, pairing, ch, cfg) / total_power(alloc, pairing, cfg, ris_watts);
}

double ee_value(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                const SystemConfig& cfg) {
  return ee_value(alloc, pairing, ch, cfg, ris_power(ris_power_model(cfg)));
}

RVec dinkelbach_power_step(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                           const SystemConfig& cfg, double ris_watts, const SolverSettings& settings,
                           DinkelbachTrace* trace) {
  const RateLowerBound bound(alloc, pairing, ch, cfg);
  PowerProgram pp = power_constraints(alloc.theta, pairing, ch, cfg);
  const double fixed = total_power(Allocation{RVec::Zero(alloc.p.size()), alloc.theta}, pairing, cfg, ris_watts);
  auto power_of = [&](const RVec& p) { return transmit_power(p, pairing) + fixed; };

  // Gradient of the transmit power over the full p vector.
  RVec power_grad = RVec::Zero(alloc.p.size());
  power_grad.tail(pairing.num_cu()).setOnes();
  for (int n : pairing.active_set()) power_grad[n] = 1.0;

  Allocation current = alloc;
  const bool start_feasible = is_feasible(alloc, pairing, ch, cfg, FeasibleSet::F1);
  double lambda = start_feasible ? bound.value(alloc.p) / power_of(alloc.p) : 0.0;
  RVec best = alloc.p;
  bool solved = false;

  for (int it = 0; it < settings.max_dinkelbach_iterations; ++it) {
    pp.program.objective = pp.wrap([&bound, &power_grad, &power_of, lambda](const RVec& p) {
      return ObjectiveEval{bound.value(p) - lambda * power_of(p), bound.gradient(p) - lambda * power_grad,
                           bound.hessian(p)};
    });
    const ConcaveSolution sol =
        solve_concave_linconstr(pp.program, pp.to_normalized(current.p), settings.power_tolerance, settings.barrier);
    if (sol.status == SolveStatus::Infeasible) throw InfeasibleError("Dinkelbach step: SINR floors cannot be met");
    const RVec p = pp.to_watts(sol.x);
    const double residual = bound.value(p) - lambda * power_of(p);
    if (trace) {
      trace->lambda.push_back(lambda);
      trace->residual.push_back(residual);
    }
    current.p = p;
    best = p;
    solved = true;
    if (residual < settings.dinkelbach_delta) break;
    lambda = bound.value(p) / power_of(p);
  }
  if (!solved) return alloc.p;

  // The bound is tight at alloc.p, so the exact ratio cannot drop unless the
  // inner solves were inexact; keep the start in that case.
  if (start_feasible) {
    Allocation trial = alloc;
    trial.p = best;
    if (ee_value(trial, pairing, ch, cfg, ris_watts) < ee_value(alloc, pairing, ch, cfg, ris_watts)) return alloc.p;
  }
  return best;
}

SolveReport maximize_ee(const ChannelRealization& ch, const SystemConfig& cfg, FeasibleSet set,
                        const SolverSettings& settings) {
  return maximize_ee(ch, cfg, set, rcs_pairing(ch), settings);
}

SolveReport maximize_ee(const ChannelRealization& ch, const SystemConfig& cfg, FeasibleSet set,
                        const Pairing& pairing, const SolverSettings& settings) {
  const double ris_watts = ris_power(ris_power_model(cfg));
  AlternatingHooks hooks;
  hooks.objective = [&](const Allocation& a) { return ee_value(a, pairing, ch, cfg, ris_watts); };
  hooks.power_step = [&](const Allocation& a) {
    return dinkelbach_power_step(a, pairing, ch, cfg, ris_watts, settings);
  };
  return alternate(initial_allocation(pairing, ch, cfg, settings), pairing, ch, cfg, set, true, hooks, settings);
}

}  // namespace risd2d
