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

#include <Eigen/Core>

#include <complex>
#include <functional>
#include <vector>

namespace risd2d {

using cplx = std::complex<double>;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

enum class SolveStatus { Optimal, Infeasible, MaxIterations };

const char* to_string(SolveStatus status);

/// Log-barrier path-following parameters shared by both solver kernels.
struct BarrierSettings {
  double initial_t = 1.0;
  double t_multiplier = 10.0;
  /// Centering stops when half the squared Newton decrement drops below this.
  double newton_tolerance = 1e-9;
  int max_newton_steps = 200;
  int max_outer_steps = 60;
};

// ---------------------------------------------------------------------------
// Concave maximization over a polyhedron
// ---------------------------------------------------------------------------

struct ObjectiveEval {
  double value = 0.0;
  RVec gradient;
  /// Optional; when empty the solver differentiates the gradient numerically.
  RMat hessian;
};

using ConcaveObjective = std::function<ObjectiveEval(const RVec&)>;

/// maximize f(x)  s.t.  A x <= b,  lower <= x <= upper.
///
/// f must be concave on the feasible set. Infinite bounds are allowed and
/// simply contribute no barrier term.
struct ConcaveProgram {
  ConcaveObjective objective;
  RMat a;
  RVec b;
  RVec lower;
  RVec upper;

  Eigen::Index dimension() const { return lower.size(); }
};

struct ConcaveSolution {
  SolveStatus status = SolveStatus::Infeasible;
  RVec x;
  double objective = 0.0;
  /// Upper bound m/t on the suboptimality of x.
  double duality_gap = 0.0;
  int newton_steps = 0;
};

/// Barrier interior-point solve. A Phase-I slack minimization supplies a
/// strictly feasible point when `start` is not one. If `start` is feasible
/// the returned objective is never below the objective at `start`.
ConcaveSolution solve_concave_linconstr(const ConcaveProgram& program, const RVec& start, double tol,
                                        const BarrierSettings& settings = {});

// ---------------------------------------------------------------------------
// Complex QCQP over the unit polydisc
// ---------------------------------------------------------------------------

/// q(θ) = -θᴴBθ + 2 Re(θᴴe) + c with B = F Fᴴ kept in factored form.
class QuadraticForm {
 public:
  QuadraticForm() = default;
  explicit QuadraticForm(Eigen::Index size);

  /// Factorizes a dense Hermitian B. Throws std::invalid_argument when B is
  /// not Hermitian or has an eigenvalue below -1e-10.
  static QuadraticForm from_dense(const CMat& b, const CVec& e, double c);

  /// B += weight * w wᴴ, weight >= 0.
  void add_outer(const CVec& w, double weight = 1.0);
  /// q -> factor * q, factor > 0.
  void scale(double factor);

  Eigen::Index size() const { return linear_.size(); }
  const CMat& factor() const { return factor_; }
  CMat matrix() const;

  CVec& linear() { return linear_; }
  const CVec& linear() const { return linear_; }
  double& constant() { return constant_; }
  double constant() const { return constant_; }

  double value(const CVec& theta) const;

 private:
  CMat factor_;
  CVec linear_;
  double constant_ = 0.0;
};

/// Constraint q(θ) >= floor.
struct QuadraticConstraint {
  QuadraticForm form;
  double floor = 0.0;
};

/// maximize q₀(θ)  s.t.  q_i(θ) >= floor_i,  |θ_m|² <= 1 for every m.
struct QcqpProgram {
  QuadraticForm objective;
  std::vector<QuadraticConstraint> constraints;

  Eigen::Index size() const { return objective.size(); }
  bool is_feasible(const CVec& theta, double slack = 1e-9) const;
};

struct QcqpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  CVec theta;
  double objective = 0.0;
  double duality_gap = 0.0;
  int newton_steps = 0;
};

/// Solved on the real 2M-dimensional embedding [Re θ; Im θ]. Newton systems
/// use the block-diagonal ball Hessian plus a low-rank update, so the cost
/// per step is linear in M for the rank structure produced by beamforming.
QcqpSolution solve_qcqp(const QcqpProgram& program, const CVec& start, double tol,
                        const BarrierSettings& settings = {});

/// True iff the smallest eigenvalue of the Hermitian matrix `a` is >= -1e-10.
bool eig_floor_check(const CMat& a);

/// Elementwise Hermitian check with tolerance 1e-12 scaled by max(1, max|a_ij|).
bool is_hermitian(const CMat& a);

}  // namespace risd2d
