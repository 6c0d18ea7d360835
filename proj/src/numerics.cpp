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

#include "risd2d/numerics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace risd2d {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::MaxIterations:
      return "max_iterations";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct NewtonStep {
  RVec gradient;
  RVec direction;
};

struct CenterResult {
  int steps = 0;
  bool exhausted = false;
};

// Damped Newton minimization of a self-concordant barrier from a strictly
// feasible x. Stops early when the line search can no longer make progress,
// which happens once the decrement is at the level of roundoff in value().
template <class Barrier>
CenterResult center(const Barrier& barrier, RVec& x, const BarrierSettings& settings) {
  CenterResult result;
  double fx = barrier.value(x);
  for (; result.steps < settings.max_newton_steps; ++result.steps) {
    NewtonStep step = barrier.newton(x);
    double slope = step.gradient.dot(step.direction);
    if (!std::isfinite(slope) || slope >= 0.0) {
      step.direction = -step.gradient;
      slope = -step.gradient.squaredNorm();
    }
    // The decrement cannot be resolved below the roundoff of value().
    const double floor = std::max(settings.newton_tolerance, 1e-13 * std::abs(fx));
    if (-0.5 * slope <= floor) return result;

    double alpha = 1.0;
    bool moved = false;
    while (alpha > 1e-16) {
      RVec trial = x + alpha * step.direction;
      const double ft = barrier.value(trial);
      if (ft <= fx + 0.25 * alpha * slope) {
        x = std::move(trial);
        fx = ft;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) return result;
  }
  result.exhausted = true;
  return result;
}

// ---------------------------------------------------------------------------
// Linear-constraint barrier
// ---------------------------------------------------------------------------

class LinearBarrier {
 public:
  LinearBarrier(const ConcaveObjective& objective, const RMat& a, const RVec& b, const RVec& lower,
                const RVec& upper)
      : objective_(objective), a_(a), b_(b), lower_(lower), upper_(upper) {}

  void set_t(double t) { t_ = t; }

  int constraint_count() const {
    int m = static_cast<int>(a_.rows());
    for (Eigen::Index i = 0; i < lower_.size(); ++i) {
      if (std::isfinite(lower_[i])) ++m;
      if (std::isfinite(upper_[i])) ++m;
    }
    return m;
  }

  double value(const RVec& x) const {
    double acc = 0.0;
    if (a_.rows() > 0) {
      const RVec slack = b_ - a_ * x;
      for (Eigen::Index i = 0; i < slack.size(); ++i) {
        if (!(slack[i] > 0.0)) return kInf;
        acc -= std::log(slack[i]);
      }
    }
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (std::isfinite(lower_[i])) {
        const double d = x[i] - lower_[i];
        if (!(d > 0.0)) return kInf;
        acc -= std::log(d);
      }
      if (std::isfinite(upper_[i])) {
        const double d = upper_[i] - x[i];
        if (!(d > 0.0)) return kInf;
        acc -= std::log(d);
      }
    }
    const double f = objective_(x).value;
    if (!std::isfinite(f)) return kInf;
    return acc - t_ * f;
  }

  NewtonStep newton(const RVec& x) const {
    const Eigen::Index n = x.size();
    const ObjectiveEval eval = objective_(x);
    RMat hess_f = eval.hessian.size() == n * n ? eval.hessian : numeric_hessian(x);

    NewtonStep step;
    step.gradient = -t_ * eval.gradient;
    RMat hessian = -t_ * 0.5 * (hess_f + hess_f.transpose());

    if (a_.rows() > 0) {
      const RVec inv_slack = (b_ - a_ * x).cwiseInverse();
      step.gradient += a_.transpose() * inv_slack;
      hessian += a_.transpose() * inv_slack.cwiseAbs2().asDiagonal() * a_;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::isfinite(lower_[i])) {
        const double inv = 1.0 / (x[i] - lower_[i]);
        step.gradient[i] -= inv;
        hessian(i, i) += inv * inv;
      }
      if (std::isfinite(upper_[i])) {
        const double inv = 1.0 / (upper_[i] - x[i]);
        step.gradient[i] += inv;
        hessian(i, i) += inv * inv;
      }
    }

    Eigen::LDLT<RMat> ldlt(hessian);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      step.direction = ldlt.solve(-step.gradient);
    } else {
      step.direction = -step.gradient;
    }
    return step;
  }

 private:
  RMat numeric_hessian(const RVec& x) const {
    const Eigen::Index n = x.size();
    RMat h(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double step = 1e-6 * std::max(1.0, std::abs(x[i]));
      RVec xp = x;
      RVec xm = x;
      xp[i] += step;
      xm[i] -= step;
      h.col(i) = (objective_(xp).gradient - objective_(xm).gradient) / (2.0 * step);
    }
    return h;
  }

  const ConcaveObjective& objective_;
  const RMat& a_;
  const RVec& b_;
  const RVec& lower_;
  const RVec& upper_;
  double t_ = 1.0;
};

RVec interior_clamp(const RVec& start, const RVec& lower, const RVec& upper) {
  RVec x = start;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const bool has_lo = std::isfinite(lower[i]);
    const bool has_hi = std::isfinite(upper[i]);
    if (has_lo && has_hi) {
      const double margin = 1e-6 * (upper[i] - lower[i]);
      x[i] = std::clamp(x[i], lower[i] + margin, upper[i] - margin);
    } else if (has_lo) {
      x[i] = std::max(x[i], lower[i] + 1e-6 * std::max(1.0, std::abs(lower[i])));
    } else if (has_hi) {
      x[i] = std::min(x[i], upper[i] - 1e-6 * std::max(1.0, std::abs(upper[i])));
    }
  }
  return x;
}

}  // namespace

ConcaveSolution solve_concave_linconstr(const ConcaveProgram& program, const RVec& start, double tol,
                                        const BarrierSettings& settings) {
  const Eigen::Index n = program.dimension();
  if (tol <= 0.0) throw std::invalid_argument("solve_concave_linconstr: tol must be positive");
  if (!program.objective) throw std::invalid_argument("solve_concave_linconstr: objective missing");
  if (program.upper.size() != n || start.size() != n)
    throw std::invalid_argument("solve_concave_linconstr: dimension mismatch");
  if (program.a.rows() != program.b.size() || (program.a.rows() > 0 && program.a.cols() != n))
    throw std::invalid_argument("solve_concave_linconstr: constraint shape mismatch");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(program.lower[i] < program.upper[i]))
      throw std::invalid_argument("solve_concave_linconstr: empty box");
  }

  // Unit-norm rows so Phase-I slack is measured uniformly across constraints.
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < program.a.rows(); ++i) {
    if (program.a.row(i).norm() > 0.0) {
      kept.push_back(i);
    } else if (program.b[i] < 0.0) {
      return {SolveStatus::Infeasible, start, 0.0, kInf, 0};
    }
  }
  RMat a(static_cast<Eigen::Index>(kept.size()), n);
  RVec b(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const double norm = program.a.row(kept[r]).norm();
    a.row(static_cast<Eigen::Index>(r)) = program.a.row(kept[r]) / norm;
    b[static_cast<Eigen::Index>(r)] = program.b[kept[r]] / norm;
  }

  auto start_feasible = [&] {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (start[i] < program.lower[i] || start[i] > program.upper[i]) return false;
    }
    if (a.rows() == 0) return true;
    return ((a * start - b).array() <= 1e-9 * (1.0 + b.array().abs())).all();
  }();
  const double start_value = start_feasible ? program.objective(start).value : -kInf;

  RVec x = interior_clamp(start, program.lower, program.upper);
  int newton_total = 0;

  if (a.rows() > 0 && (a * x - b).maxCoeff() >= 0.0) {
    // Phase I: minimize s subject to A x - b <= s over the box, s <= s_max.
    const double s0 = (a * x - b).maxCoeff() + 1.0;
    RMat a1(a.rows(), n + 1);
    a1 << a, -RVec::Ones(a.rows());
    RVec lo1(n + 1), hi1(n + 1);
    lo1 << program.lower, -kInf;
    hi1 << program.upper, 2.0 * s0;
    const ConcaveObjective slack_objective = [n](const RVec& z) {
      ObjectiveEval e;
      e.value = -z[n];
      e.gradient = RVec::Zero(n + 1);
      e.gradient[n] = -1.0;
      e.hessian = RMat::Zero(n + 1, n + 1);
      return e;
    };
    LinearBarrier phase1(slack_objective, a1, b, lo1, hi1);
    RVec z(n + 1);
    z << x, s0;
    double t = settings.initial_t;
    const int m1 = phase1.constraint_count();
    bool found = false;
    for (int outer = 0; outer < settings.max_outer_steps; ++outer) {
      phase1.set_t(t);
      newton_total += center(phase1, z, settings).steps;
      if (z[n] < 0.0) {
        found = true;
        break;
      }
      if (m1 / t < 1e-12) break;
      t *= settings.t_multiplier;
    }
    if (!found) {
      if (start_feasible) return {SolveStatus::Optimal, start, start_value, kInf, newton_total};
      return {SolveStatus::Infeasible, start, 0.0, kInf, newton_total};
    }
    x = z.head(n);
  }

  LinearBarrier barrier(program.objective, a, b, program.lower, program.upper);
  const int m = barrier.constraint_count();
  double t = settings.initial_t;
  SolveStatus status = SolveStatus::MaxIterations;
  for (int outer = 0; outer < settings.max_outer_steps; ++outer) {
    barrier.set_t(t);
    const CenterResult c = center(barrier, x, settings);
    newton_total += c.steps;
    if (m == 0 || m / t < tol) {
      status = c.exhausted ? SolveStatus::MaxIterations : SolveStatus::Optimal;
      break;
    }
    t *= settings.t_multiplier;
  }

  ConcaveSolution solution{status, x, program.objective(x).value, m == 0 ? 0.0 : m / t, newton_total};
  if (start_feasible && start_value > solution.objective) {
    solution.x = start;
    solution.objective = start_value;
  }
  return solution;
}

// ---------------------------------------------------------------------------
// QuadraticForm
// ---------------------------------------------------------------------------

QuadraticForm::QuadraticForm(Eigen::Index size) : factor_(size, 0), linear_(CVec::Zero(size)) {}

QuadraticForm QuadraticForm::from_dense(const CMat& b, const CVec& e, double c) {
  if (b.rows() != b.cols() || b.rows() != e.size())
    throw std::invalid_argument("QuadraticForm: dimension mismatch");
  if (!is_hermitian(b)) throw std::invalid_argument("QuadraticForm: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> eig(b);
  const RVec& lambda = eig.eigenvalues();
  if (lambda.size() > 0 && lambda.minCoeff() < -1e-10)
    throw std::invalid_argument("QuadraticForm: matrix is not positive semidefinite");

  QuadraticForm form(e.size());
  form.linear_ = e;
  form.constant_ = c;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] > 0.0) form.add_outer(eig.eigenvectors().col(i), lambda[i]);
  }
  return form;
}

void QuadraticForm::add_outer(const CVec& w, double weight) {
  if (w.size() != size()) throw std::invalid_argument("QuadraticForm::add_outer: dimension mismatch");
  if (weight < 0.0) throw std::invalid_argument("QuadraticForm::add_outer: negative weight");
  if (weight == 0.0) return;
  factor_.conservativeResize(size(), factor_.cols() + 1);
  factor_.col(factor_.cols() - 1) = std::sqrt(weight) * w;
}

void QuadraticForm::scale(double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("QuadraticForm::scale: factor must be positive");
  factor_ *= std::sqrt(factor);
  linear_ *= factor;
  constant_ *= factor;
}

CMat QuadraticForm::matrix() const {
  if (factor_.cols() == 0) return CMat::Zero(size(), size());
  return factor_ * factor_.adjoint();
}

double QuadraticForm::value(const CVec& theta) const {
  const double quad = factor_.cols() == 0 ? 0.0 : (factor_.adjoint() * theta).squaredNorm();
  return -quad + 2.0 * theta.dot(linear_).real() + constant_;
}

bool QcqpProgram::is_feasible(const CVec& theta, double slack) const {
  if (theta.size() != size()) return false;
  if ((theta.array().abs2() > 1.0 + slack).any()) return false;
  for (const auto& c : constraints) {
    if (c.form.value(theta) < c.floor - slack) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// QCQP barrier on the real embedding x = [Re θ; Im θ]
// ---------------------------------------------------------------------------

namespace {

// q(x) = -|Wᵀx|² + 2 eᵀx + c
struct RealForm {
  RMat w;
  RVec e;
  double c = 0.0;

  double value(const Eigen::Ref<const RVec>& x) const {
    const double quad = w.cols() == 0 ? 0.0 : (w.transpose() * x).squaredNorm();
    return -quad + 2.0 * e.dot(x) + c;
  }
  RVec gradient(const Eigen::Ref<const RVec>& x) const {
    RVec g = 2.0 * e;
    if (w.cols() > 0) g -= 2.0 * (w * (w.transpose() * x));
    return g;
  }
};

RealForm embed(const QuadraticForm& form, double floor) {
  const Eigen::Index m = form.size();
  const Eigen::Index r = form.factor().cols();
  RealForm out;
  out.w.resize(2 * m, 2 * r);
  if (r > 0) {
    const RMat fr = form.factor().real();
    const RMat fi = form.factor().imag();
    out.w.topLeftCorner(m, r) = fr;
    out.w.bottomLeftCorner(m, r) = fi;
    out.w.topRightCorner(m, r) = -fi;
    out.w.bottomRightCorner(m, r) = fr;
  }
  out.e.resize(2 * m);
  out.e << form.linear().real(), form.linear().imag();
  out.c = form.constant() - floor;
  return out;
}

class QcqpBarrier {
 public:
  QcqpBarrier(Eigen::Index m, const RealForm& objective, const std::vector<RealForm>& constraints,
              bool phase1, double s_max)
      : m_(m), objective_(objective), constraints_(constraints), phase1_(phase1), s_max_(s_max) {}

  void set_t(double t) { t_ = t; }

  double value(const RVec& z) const {
    const auto x = z.head(2 * m_);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double s = 1.0 - x[i] * x[i] - x[m_ + i] * x[m_ + i];
      if (!(s > 0.0)) return kInf;
      acc -= std::log(s);
    }
    const double slack_var = phase1_ ? z[2 * m_] : 0.0;
    for (const auto& c : constraints_) {
      const double g = c.value(x) + slack_var;
      if (!(g > 0.0)) return kInf;
      acc -= std::log(g);
    }
    if (phase1_) {
      const double room = s_max_ - slack_var;
      if (!(room > 0.0)) return kInf;
      return acc - std::log(room) + t_ * slack_var;
    }
    return acc - t_ * objective_.value(x);
  }

  NewtonStep newton(const RVec& z) const {
    const Eigen::Index n = z.size();
    const Eigen::Index two_m = 2 * m_;
    const auto x = z.head(two_m);

    NewtonStep step;
    step.gradient = RVec::Zero(n);

    // Block-diagonal part: one 2x2 block per reflecting element, plus the
    // slack upper bound in Phase I.
    RVec d11(m_), d12(m_), d22(m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double a = x[i];
      const double b = x[m_ + i];
      const double s = 1.0 - a * a - b * b;
      step.gradient[i] += 2.0 * a / s;
      step.gradient[m_ + i] += 2.0 * b / s;
      const double s2 = s * s;
      d11[i] = 2.0 / s + 4.0 * a * a / s2;
      d12[i] = 4.0 * a * b / s2;
      d22[i] = 2.0 / s + 4.0 * b * b / s2;
    }
    double dss = 0.0;

    Eigen::Index rank = phase1_ ? 0 : objective_.w.cols();
    for (const auto& c : constraints_) rank += 1 + c.w.cols();
    RMat v = RMat::Zero(n, rank);
    Eigen::Index col = 0;

    if (phase1_) {
      const double room = s_max_ - z[two_m];
      step.gradient[two_m] += t_ + 1.0 / room;
      dss = 1.0 / (room * room);
    } else {
      step.gradient.head(two_m) -= t_ * objective_.gradient(x);
      const Eigen::Index r = objective_.w.cols();
      if (r > 0) v.block(0, col, two_m, r) = std::sqrt(2.0 * t_) * objective_.w;
      col += r;
    }

    const double slack_var = phase1_ ? z[two_m] : 0.0;
    for (const auto& c : constraints_) {
      const double g = c.value(x) + slack_var;
      const RVec grad_g = c.gradient(x);
      step.gradient.head(two_m) -= grad_g / g;
      v.block(0, col, two_m, 1) = grad_g / g;
      if (phase1_) {
        step.gradient[two_m] -= 1.0 / g;
        v(two_m, col) = 1.0 / g;
      }
      ++col;
      const Eigen::Index r = c.w.cols();
      if (r > 0) v.block(0, col, two_m, r) = std::sqrt(2.0 / g) * c.w;
      col += r;
    }

    auto apply_dinv = [&](const Eigen::Ref<const RVec>& r) {
      RVec out(n);
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double det = d11[i] * d22[i] - d12[i] * d12[i];
        out[i] = (d22[i] * r[i] - d12[i] * r[m_ + i]) / det;
        out[m_ + i] = (d11[i] * r[m_ + i] - d12[i] * r[i]) / det;
      }
      if (phase1_) out[two_m] = r[two_m] / dss;
      return out;
    };

    // Woodbury: (D + V Vᵀ)⁻¹ = D⁻¹ - D⁻¹V (I + VᵀD⁻¹V)⁻¹ VᵀD⁻¹
    if (rank == 0) {
      step.direction = apply_dinv(-step.gradient);
      return step;
    }
    RMat dinv_v(n, rank);
    for (Eigen::Index j = 0; j < rank; ++j) dinv_v.col(j) = apply_dinv(v.col(j));
    RMat capacitance = v.transpose() * dinv_v;
    capacitance.diagonal().array() += 1.0;
    Eigen::LLT<RMat> llt(capacitance);
    if (llt.info() != Eigen::Success) {
      step.direction = -step.gradient;
      return step;
    }
    auto solve = [&](const RVec& rhs) {
      const RVec d = apply_dinv(rhs);
      return RVec(d - dinv_v * llt.solve(v.transpose() * d));
    };
    auto apply_h = [&](const RVec& d) {
      RVec out = v * (v.transpose() * d);
      for (Eigen::Index i = 0; i < m_; ++i) {
        out[i] += d11[i] * d[i] + d12[i] * d[m_ + i];
        out[m_ + i] += d12[i] * d[i] + d22[i] * d[m_ + i];
      }
      if (phase1_) out[two_m] += dss * d[two_m];
      return out;
    };
    // Woodbury loses digits when V Vᵀ dwarfs D at large t; iterative
    // refinement against the exact product recovers them.
    const RVec rhs = -step.gradient;
    step.direction = solve(rhs);
    for (int pass = 0; pass < 3; ++pass) {
      const RVec residual = rhs - apply_h(step.direction);
      if (residual.norm() <= 1e-14 * rhs.norm()) break;
      step.direction += solve(residual);
    }
    return step;
  }

 private:
  Eigen::Index m_;
  const RealForm& objective_;
  const std::vector<RealForm>& constraints_;
  bool phase1_;
  double s_max_;
  double t_ = 1.0;
};

RVec to_real(const CVec& theta) {
  RVec x(2 * theta.size());
  x << theta.real(), theta.imag();
  return x;
}

CVec to_complex(const Eigen::Ref<const RVec>& x) {
  const Eigen::Index m = x.size() / 2;
  CVec theta(m);
  for (Eigen::Index i = 0; i < m; ++i) theta[i] = cplx(x[i], x[m + i]);
  return theta;
}

}  // namespace

QcqpSolution solve_qcqp(const QcqpProgram& program, const CVec& start, double tol,
                        const BarrierSettings& settings) {
  const Eigen::Index m = program.size();
  if (tol <= 0.0) throw std::invalid_argument("solve_qcqp: tol must be positive");
  if (start.size() != m) throw std::invalid_argument("solve_qcqp: start has wrong dimension");
  for (const auto& c : program.constraints) {
    if (c.form.size() != m) throw std::invalid_argument("solve_qcqp: constraint dimension mismatch");
  }

  const bool start_feasible = program.is_feasible(start);
  const double start_value = program.objective.value(start);

  const RealForm objective = embed(program.objective, 0.0);
  std::vector<RealForm> constraints;
  constraints.reserve(program.constraints.size());
  for (const auto& c : program.constraints) constraints.push_back(embed(c.form, c.floor));

  // Strict interior of the polydisc.
  // Strict interior of the polydisc. A start hugging the unit circle makes
  // the first centering crawl, so pull it inward while the constraints allow.
  auto shrink = [&](double radius) {
    CVec out = start;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double r = std::abs(out[i]);
      if (r > radius) out[i] *= radius / r;
    }
    return to_real(out);
  };
  auto strictly_inside = [&](const RVec& z) {
    for (const auto& c : constraints) {
      if (!(c.value(z) > 0.0)) return false;
    }
    return true;
  };
  RVec x = shrink(1.0 - 1e-9);
  for (double radius : {0.95, 0.99, 0.999}) {
    RVec trial = shrink(radius);
    if (strictly_inside(trial)) {
      x = std::move(trial);
      break;
    }
  }
  int newton_total = 0;

  double worst = -kInf;
  for (const auto& c : constraints) worst = std::max(worst, -c.value(x));
  if (!constraints.empty() && worst >= 0.0) {
    const double s0 = worst + 1.0;
    QcqpBarrier phase1(m, objective, constraints, true, 2.0 * s0 + 1.0);
    RVec z(2 * m + 1);
    z << x, s0;
    const double m1 = static_cast<double>(m + constraints.size() + 1);
    double t = settings.initial_t;
    bool found = false;
    for (int outer = 0; outer < settings.max_outer_steps; ++outer) {
      phase1.set_t(t);
      newton_total += center(phase1, z, settings).steps;
      if (z[2 * m] < 0.0) {
        found = true;
        break;
      }
      if (m1 / t < 1e-12) break;
      t *= settings.t_multiplier;
    }
    if (!found) {
      if (start_feasible) return {SolveStatus::Optimal, start, start_value, kInf, newton_total};
      return {SolveStatus::Infeasible, start, start_value, kInf, newton_total};
    }
    x = z.head(2 * m);
  }

  QcqpBarrier barrier(m, objective, constraints, false, 0.0);
  const double count = static_cast<double>(m + constraints.size());
  double t = settings.initial_t;
  SolveStatus status = SolveStatus::MaxIterations;
  for (int outer = 0; outer < settings.max_outer_steps; ++outer) {
    barrier.set_t(t);
    const CenterResult c = center(barrier, x, settings);
    newton_total += c.steps;
    if (count / t < tol) {
      status = c.exhausted ? SolveStatus::MaxIterations : SolveStatus::Optimal;
      break;
    }
    t *= settings.t_multiplier;
  }

  QcqpSolution solution{status, to_complex(x), 0.0, count / t, newton_total};
  solution.objective = program.objective.value(solution.theta);
  if (start_feasible && start_value > solution.objective) {
    solution.theta = start;
    solution.objective = start_value;
  }
  return solution;
}

// ---------------------------------------------------------------------------

bool is_hermitian(const CMat& a) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

bool eig_floor_check(const CMat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eig_floor_check: matrix is not square");
  if (!is_hermitian(a)) throw std::invalid_argument("eig_floor_check: matrix is not Hermitian");
  if (a.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<CMat> eig(a, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -1e-10;
}

}  // namespace risd2d
