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

#include "risd2d/channel.hpp"
#include "risd2d/numerics.hpp"
#include "risd2d/pairing.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace risd2d {

/// F1: |β_m| <= 1, F2: |β_m| = 1, F3: |β_m| = 1 with B-bit phases.
enum class FeasibleSet { F1, F2, F3 };

const char* to_string(FeasibleSet set);
FeasibleSet parse_feasible_set(const std::string& text);

/// Transmit powers (N D2D entries, then K CU entries, in watts) and the RIS
/// reflecting coefficients β = diag(Φ).
struct Allocation {
  RVec p;
  CVec theta;

  double d2d_power(int n) const { return p[n]; }
  double cu_power(int k, int num_d2d) const { return p[num_d2d + k]; }
};

/// Composite channels for a given Φ: a(n) = g_nᴴΦf_n + h_nn,
/// b(n, k) = g_nᴴΦf̃_k + v_nk, c(k) = g̃ᴴΦf̃_k + h̃_k, d(i) = g̃ᴴΦf_i + u_i.
struct CompositeChannels {
  CVec a;
  CMat b;
  CVec c;
  CVec d;
};

CompositeChannels composite_channels(const CVec& theta, const ChannelRealization& ch);

/// Per-link SINRs; inactive D2D links get 0.
struct SinrSet {
  RVec d2d;
  RVec cu;
};

double sinr_d2d(int n, const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                const SystemConfig& cfg);
double sinr_cu(int k, const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
               const SystemConfig& cfg);
SinrSet all_sinrs(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                  const SystemConfig& cfg);

/// Σ_{n∈D} log₂(1+γ_n^d) + Σ_k log₂(1+γ_k^c), bps/Hz.
double sum_rate(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                const SystemConfig& cfg);

/// Checks power boxes, SINR floors (relative slack `tol`) and the
/// coefficient set. F3 phases must sit on the 2^B grid within 1e-9 rad.
bool is_feasible(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                 const SystemConfig& cfg, FeasibleSet set, double tol = 1e-6);

// ---------------------------------------------------------------------------
// Power allocation
// ---------------------------------------------------------------------------

/// Concave lower bound on the sum rate in p, built at an expansion point with
/// Φ fixed: each -log₂(interference + σ²) is replaced by its tangent.
class RateLowerBound {
 public:
  RateLowerBound(const Allocation& expansion, const Pairing& pairing, const ChannelRealization& ch,
                 const SystemConfig& cfg);

  double value(const RVec& p) const;
  RVec gradient(const RVec& p) const;
  RMat hessian(const RVec& p) const;

  const RVec& expansion() const { return expansion_; }

 private:
  // One rate term: log₂(own·p + interf·p + 1) minus the linearized
  // log₂(interf·p + 1), all gains normalized by σ².
  struct Term {
    RVec own;
    RVec interf;
    double anchor = 0.0;  // interf·p⁽ʲ⁾ + 1
  };
  std::vector<Term> terms_;
  RVec expansion_;
};

/// Linear SINR constraints and power boxes of the power subproblem in the
/// normalized variables q = p / p_max over the active entries of p.
struct PowerProgram {
  ConcaveProgram program;
  std::vector<int> slots;  // program variable -> index into p
  RVec scale;              // p_max per program variable
  Eigen::Index full_size = 0;

  RVec to_watts(const RVec& q) const;
  RVec to_normalized(const RVec& p) const;
  /// Wraps an objective over full-length p into one over q.
  ConcaveObjective wrap(std::function<ObjectiveEval(const RVec& p)> f) const;
};

PowerProgram power_constraints(const CVec& theta, const Pairing& pairing, const ChannelRealization& ch,
                               const SystemConfig& cfg);

struct SolverSettings {
  double epsilon = 1e-2;  // outer stop on objective increase
  int max_outer_iterations = 50;
  double power_tolerance = 1e-9;
  double qcqp_tolerance = 1e-7;
  double dinkelbach_delta = 1e-3;
  int max_dinkelbach_iterations = 100;
  int restoration_rounds = 6;
  /// Doubling line-search steps along the beamforming step and along the
  /// displacement over the last two outer iterations; 0 disables both.
  int extrapolation_steps = 20;
  std::uint64_t init_seed = 1;
  BarrierSettings barrier;
};

/// Maximizes the rate lower bound around alloc.p with alloc.theta fixed.
/// Throws InfeasibleError when the SINR floors cannot be met.
RVec sca_power_step(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                    const SystemConfig& cfg, const SolverSettings& settings = {});

// ---------------------------------------------------------------------------
// Passive beamforming
// ---------------------------------------------------------------------------

/// Auxiliary variables of the fractional-programming reformulation.
/// y holds N D2D entries then K CU entries.
struct FpState {
  RVec eta_d2d;
  RVec eta_cu;
  CVec y;
  CVec x_d2d;
  CVec x_cu;
};

/// Optimal multipliers of the Lagrangian dual transform: η = γ.
SinrSet lagrangian_eta_update(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                              const SystemConfig& cfg);

/// Σ log(1+η) - η + (1+η)γ/(1+γ) over active links, in nats.
double lagrangian_objective(const Allocation& alloc, const SinrSet& eta, const Pairing& pairing,
                            const ChannelRealization& ch, const SystemConfig& cfg);

/// Σ (1+η)γ/(1+γ), the sum-of-ratios part of the Lagrangian objective.
double ratio_objective(const Allocation& alloc, const SinrSet& eta, const Pairing& pairing,
                       const ChannelRealization& ch, const SystemConfig& cfg);

CVec quadratic_y_update(const Allocation& alloc, const SinrSet& eta, const Pairing& pairing,
                        const ChannelRealization& ch, const SystemConfig& cfg);

/// Quadratic-transform objective for explicit y, evaluated directly.
double quadratic_objective(const Allocation& alloc, const SinrSet& eta, const CVec& y, const Pairing& pairing,
                           const ChannelRealization& ch, const SystemConfig& cfg);

struct AuxX {
  CVec d2d;
  CVec cu;
};

AuxX x_updates(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
               const SystemConfig& cfg);

/// Quadratic lower surrogates of the SINRs for explicit x, evaluated directly.
double sinr_surrogate_d2d(int n, const Allocation& alloc, cplx x, const Pairing& pairing,
                          const ChannelRealization& ch, const SystemConfig& cfg);
double sinr_surrogate_cu(int k, const Allocation& alloc, cplx x, const Pairing& pairing,
                         const ChannelRealization& ch, const SystemConfig& cfg);

/// QCQP in the variable conj(β): objective is the quadratic-transform
/// objective, one constraint per active D2D link and per CU.
QcqpProgram assemble_qcqp(const Allocation& alloc, const SinrSet& eta, const CVec& y, const AuxX& x,
                          const Pairing& pairing, const ChannelRealization& ch, const SystemConfig& cfg);

/// One pass of η, y, x updates and a QCQP solve. Returns the new β.
/// Throws InfeasibleError when the surrogate constraints have no solution.
CVec beamforming_step(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                      const SystemConfig& cfg, const SolverSettings& settings = {});

CVec project_f2(const CVec& theta);
CVec project_f3(const CVec& theta, int bits);

/// Unit-modulus coefficients with uniform phases; on the 2^bits grid when
/// bits > 0.
CVec random_phases(Eigen::Index size, Rng& rng, int bits = 0);

// ---------------------------------------------------------------------------
// Alternating optimization
// ---------------------------------------------------------------------------

struct SolveReport {
  std::vector<double> trace;  // objective after each outer iteration, entry 0 = start
  int iterations = 0;
  bool feasible = false;
  double objective = 0.0;  // final, after any projection
  double sum_rate = 0.0;
  double wall_seconds = 0.0;
  Allocation allocation;
  Pairing pairing;
  FeasibleSet feasible_set = FeasibleSet::F1;
  std::uint64_t init_seed = 0;
  std::string note;
};

/// Callbacks that specialize the alternating loop to one objective.
struct AlternatingHooks {
  std::function<double(const Allocation&)> objective;
  /// Returns new powers for fixed θ; may throw InfeasibleError.
  std::function<RVec(const Allocation&)> power_step;
};

/// Alternates power and beamforming steps from `start` until the objective
/// increases by less than settings.epsilon. With optimize_theta false, θ
/// stays fixed and only powers move. F2/F3 results are projected at the end
/// and repaired by one power step if a floor is violated.
SolveReport alternate(const Allocation& start, const Pairing& pairing, const ChannelRealization& ch,
                      const SystemConfig& cfg, FeasibleSet set, bool optimize_theta, const AlternatingHooks& hooks,
                      const SolverSettings& settings = {});

/// Projects an F1 result onto F2 or F3 and repairs violated floors with one
/// power step. `feasible` is true only when the F1 run was feasible and the
/// projected point meets every constraint of `set`.
SolveReport project_solution(const SolveReport& f1, const ChannelRealization& ch, const SystemConfig& cfg,
                             FeasibleSet set, const AlternatingHooks& hooks);

/// Sum-rate objective and SCA power step for a fixed pairing. The hooks
/// refer to pairing, ch and cfg, which must outlive them.
AlternatingHooks se_hooks(const Pairing& pairing, const ChannelRealization& ch, const SystemConfig& cfg,
                          const SolverSettings& settings);

/// project_solution with the sum-rate hooks.
SolveReport project_se(const SolveReport& f1, const ChannelRealization& ch, const SystemConfig& cfg, FeasibleSet set,
                       const SolverSettings& settings = {});

/// p = p_max everywhere, random unit-modulus θ seeded by settings.init_seed.
Allocation initial_allocation(const Pairing& pairing, const ChannelRealization& ch, const SystemConfig& cfg,
                              const SolverSettings& settings);

SolveReport maximize_se(const ChannelRealization& ch, const SystemConfig& cfg, FeasibleSet set,
                        const SolverSettings& settings = {});
SolveReport maximize_se(const ChannelRealization& ch, const SystemConfig& cfg, FeasibleSet set,
                        const Pairing& pairing, const SolverSettings& settings = {});

}  // namespace risd2d
