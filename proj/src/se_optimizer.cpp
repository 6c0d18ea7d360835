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

#include "risd2d/se_optimizer.hpp"

#include "risd2d/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace risd2d {

const char* to_string(FeasibleSet set) {
  switch (set) {
    case FeasibleSet::F1:
      return "f1";
    case FeasibleSet::F2:
      return "f2";
    case FeasibleSet::F3:
      return "f3";
  }
  return "?";
}

FeasibleSet parse_feasible_set(const std::string& text) {
  if (text == "f1" || text == "F1") return FeasibleSet::F1;
  if (text == "f2" || text == "F2") return FeasibleSet::F2;
  if (text == "f3" || text == "F3") return FeasibleSet::F3;
  throw std::invalid_argument("unknown feasible set '" + text + "' (expected f1, f2 or f3)");
}

namespace {

constexpr double kLn2 = std::numbers::ln2;

// gᴴ diag(β) f
cplx cascade(const CVec& g, const CVec& beta, const CVec& f) { return g.dot(beta.cwiseProduct(f)); }

// Elementwise conj(g)·f, so that conj(β)ᴴ ω = gᴴ diag(β) f.
CVec omega(const CVec& g, const CVec& f) { return g.conjugate().cwiseProduct(f); }

void check_sizes(const Allocation& alloc, const ChannelRealization& ch) {
  if (alloc.p.size() != ch.num_d2d() + ch.num_cu())
    throw std::invalid_argument("allocation power vector must have N + K entries");
  if (alloc.theta.size() != ch.ris_elements())
    throw std::invalid_argument("allocation coefficient vector must have M entries");
}

// Received useful power and interference of each link at the current point.
struct LinkPowers {
  RVec signal_d2d, interf_d2d;
  RVec signal_cu, interf_cu;
};

LinkPowers link_powers(const Allocation& alloc, const Pairing& pairing, const CompositeChannels& cc) {
  const int n_d2d = pairing.num_d2d();
  const int n_cu = pairing.num_cu();
  LinkPowers lp{RVec::Zero(n_d2d), RVec::Zero(n_d2d), RVec::Zero(n_cu), RVec::Zero(n_cu)};
  for (int n = 0; n < n_d2d; ++n) {
    const int k = pairing.cu_of(n);
    if (k < 0) continue;
    lp.signal_d2d[n] = alloc.p[n] * std::norm(cc.a[n]);
    lp.interf_d2d[n] = alloc.p[n_d2d + k] * std::norm(cc.b(n, k));
  }
  for (int k = 0; k < n_cu; ++k) {
    lp.signal_cu[k] = alloc.p[n_d2d + k] * std::norm(cc.c[k]);
    const int i = pairing.d2d_of(k);
    if (i >= 0) lp.interf_cu[k] = alloc.p[i] * std::norm(cc.d[i]);
  }
  return lp;
}

}  // namespace

CompositeChannels composite_channels(const CVec& theta, const ChannelRealization& ch) {
  const int n_d2d = ch.num_d2d();
  const int n_cu = ch.num_cu();
  CompositeChannels cc{CVec(n_d2d), CMat(n_d2d, n_cu), CVec(n_cu), CVec(n_d2d)};
  for (int n = 0; n < n_d2d; ++n) {
    cc.a[n] = cascade(ch.ris_rx[n], theta, ch.tx_ris[n]) + ch.d2d(n, n);
    for (int k = 0; k < n_cu; ++k) cc.b(n, k) = cascade(ch.ris_rx[n], theta, ch.cu_ris[k]) + ch.cu_rx(n, k);
    cc.d[n] = cascade(ch.ris_bs, theta, ch.tx_ris[n]) + ch.tx_bs[n];
  }
  for (int k = 0; k < n_cu; ++k) cc.c[k] = cascade(ch.ris_bs, theta, ch.cu_ris[k]) + ch.cu_bs[k];
  return cc;
}

SinrSet all_sinrs(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                  const SystemConfig& cfg) {
  check_sizes(alloc, ch);
  const LinkPowers lp = link_powers(alloc, pairing, composite_channels(alloc.theta, ch));
  SinrSet s{RVec::Zero(pairing.num_d2d()), RVec::Zero(pairing.num_cu())};
  for (int n = 0; n < pairing.num_d2d(); ++n) {
    if (pairing.is_active(n)) s.d2d[n] = lp.signal_d2d[n] / (lp.interf_d2d[n] + cfg.noise_power);
  }
  for (int k = 0; k < pairing.num_cu(); ++k) s.cu[k] = lp.signal_cu[k] / (lp.interf_cu[k] + cfg.noise_power);
  return s;
}

double sinr_d2d(int n, const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                const SystemConfig& cfg) {
  return all_sinrs(alloc, pairing, ch, cfg).d2d[n];
}

double sinr_cu(int k, const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
               const SystemConfig& cfg) {
  return all_sinrs(alloc, pairing, ch, cfg).cu[k];
}

double sum_rate(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                const SystemConfig& cfg) {
  const SinrSet s = all_sinrs(alloc, pairing, ch, cfg);
  double r = 0.0;
  for (int n = 0; n < pairing.num_d2d(); ++n) {
    if (pairing.is_active(n)) r += std::log2(1.0 + s.d2d[n]);
  }
  for (int k = 0; k < pairing.num_cu(); ++k) r += std::log2(1.0 + s.cu[k]);
  return r;
}

namespace {

bool sinr_feasible(const SinrSet& s, const Pairing& pairing, const SystemConfig& cfg, double tol) {
  for (int n = 0; n < pairing.num_d2d(); ++n) {
    if (pairing.is_active(n) && s.d2d[n] < cfg.gamma_min_d2d * (1.0 - tol)) return false;
  }
  for (int k = 0; k < pairing.num_cu(); ++k) {
    if (s.cu[k] < cfg.gamma_min_cu * (1.0 - tol)) return false;
  }
  return true;
}

bool on_phase_grid(cplx beta, int bits) {
  const double step = 2.0 * std::numbers::pi / std::exp2(bits);
  const double t = std::arg(beta) / step;
  return std::abs(t - std::round(t)) * step < 1e-9;
}

}  // namespace

bool is_feasible(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                 const SystemConfig& cfg, FeasibleSet set, double tol) {
  const int n_d2d = pairing.num_d2d();
  for (Eigen::Index i = 0; i < alloc.p.size(); ++i) {
    const double cap = i < n_d2d ? cfg.p_max_d2d : cfg.p_max_cu;
    if (alloc.p[i] < -tol * cap || alloc.p[i] > cap * (1.0 + tol)) return false;
  }
  for (Eigen::Index m = 0; m < alloc.theta.size(); ++m) {
    const double r = std::abs(alloc.theta[m]);
    if (set == FeasibleSet::F1) {
      if (r > 1.0 + 1e-8) return false;
    } else {
      if (std::abs(r - 1.0) > 1e-8) return false;
      if (set == FeasibleSet::F3 && !on_phase_grid(alloc.theta[m], cfg.phase_bits)) return false;
    }
  }
  return sinr_feasible(all_sinrs(alloc, pairing, ch, cfg), pairing, cfg, tol);
}

// ---------------------------------------------------------------------------
// Power allocation
// ---------------------------------------------------------------------------

RateLowerBound::RateLowerBound(const Allocation& expansion, const Pairing& pairing, const ChannelRealization& ch,
                               const SystemConfig& cfg)
    : expansion_(expansion.p) {
  check_sizes(expansion, ch);
  const CompositeChannels cc = composite_channels(expansion.theta, ch);
  const int n_d2d = pairing.num_d2d();
  const Eigen::Index size = expansion.p.size();
  const double inv_noise = 1.0 / cfg.noise_power;
  for (int n = 0; n < n_d2d; ++n) {
    const int k = pairing.cu_of(n);
    if (k < 0) continue;
    Term t{RVec::Zero(size), RVec::Zero(size), 0.0};
    t.own[n] = std::norm(cc.a[n]) * inv_noise;
    t.interf[n_d2d + k] = std::norm(cc.b(n, k)) * inv_noise;
    terms_.push_back(std::move(t));
  }
  for (int k = 0; k < pairing.num_cu(); ++k) {
    Term t{RVec::Zero(size), RVec::Zero(size), 0.0};
    t.own[n_d2d + k] = std::norm(cc.c[k]) * inv_noise;
    const int i = pairing.d2d_of(k);
    if (i >= 0) t.interf[i] = std::norm(cc.d[i]) * inv_noise;
    terms_.push_back(std::move(t));
  }
  for (auto& t : terms_) t.anchor = 1.0 + t.interf.dot(expansion_);
}

double RateLowerBound::value(const RVec& p) const {
  double v = 0.0;
  for (const auto& t : terms_) {
    const double total = 1.0 + t.own.dot(p) + t.interf.dot(p);
    v += std::log2(total) - std::log2(t.anchor) - t.interf.dot(p - expansion_) / (t.anchor * kLn2);
  }
  return v;
}

RVec RateLowerBound::gradient(const RVec& p) const {
  RVec g = RVec::Zero(p.size());
  for (const auto& t : terms_) {
    const double total = 1.0 + t.own.dot(p) + t.interf.dot(p);
    g += (t.own + t.interf) / (total * kLn2) - t.interf / (t.anchor * kLn2);
  }
  return g;
}

RMat RateLowerBound::hessian(const RVec& p) const {
  RMat h = RMat::Zero(p.size(), p.size());
  for (const auto& t : terms_) {
    const RVec w = t.own + t.interf;
    const double total = 1.0 + w.dot(p);
    h -= (w * w.transpose()) / (total * total * kLn2);
  }
  return h;
}

RVec PowerProgram::to_watts(const RVec& q) const {
  RVec p = RVec::Zero(full_size);
  for (std::size_t i = 0; i < slots.size(); ++i) p[slots[i]] = scale[i] * q[i];
  return p;
}

RVec PowerProgram::to_normalized(const RVec& p) const {
  RVec q(static_cast<Eigen::Index>(slots.size()));
  for (std::size_t i = 0; i < slots.size(); ++i) q[i] = p[slots[i]] / scale[i];
  return q;
}

ConcaveObjective PowerProgram::wrap(std::function<ObjectiveEval(const RVec& p)> f) const {
  return [this, f = std::move(f)](const RVec& q) {
    const ObjectiveEval full = f(to_watts(q));
    const auto n = static_cast<Eigen::Index>(slots.size());
    ObjectiveEval e;
    e.value = full.value;
    e.gradient.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) e.gradient[i] = full.gradient[slots[i]] * scale[i];
    if (full.hessian.size() > 0) {
      e.hessian.resize(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) e.hessian(i, j) = full.hessian(slots[i], slots[j]) * scale[i] * scale[j];
      }
    }
    return e;
  };
}

PowerProgram power_constraints(const CVec& theta, const Pairing& pairing, const ChannelRealization& ch,
                               const SystemConfig& cfg) {
  const int n_d2d = pairing.num_d2d();
  const int n_cu = pairing.num_cu();
  const CompositeChannels cc = composite_channels(theta, ch);

  PowerProgram pp;
  pp.full_size = n_d2d + n_cu;
  std::vector<int> var_of_slot(pp.full_size, -1);
  for (int n : pairing.active_set()) {
    var_of_slot[n] = static_cast<int>(pp.slots.size());
    pp.slots.push_back(n);
  }
  for (int k = 0; k < n_cu; ++k) {
    var_of_slot[n_d2d + k] = static_cast<int>(pp.slots.size());
    pp.slots.push_back(n_d2d + k);
  }
  const auto nv = static_cast<Eigen::Index>(pp.slots.size());
  pp.scale.resize(nv);
  for (Eigen::Index i = 0; i < nv; ++i) pp.scale[i] = pp.slots[i] < n_d2d ? cfg.p_max_d2d : cfg.p_max_cu;

  // γ_min (σ² + interference) - signal <= 0, divided by σ².
  const auto rows = static_cast<Eigen::Index>(pairing.active_set().size()) + n_cu;
  pp.program.a = RMat::Zero(rows, nv);
  pp.program.b = RVec::Zero(rows);
  const double inv_noise = 1.0 / cfg.noise_power;
  Eigen::Index r = 0;
  for (int n : pairing.active_set()) {
    const int k = pairing.cu_of(n);
    const int own = var_of_slot[n];
    const int other = var_of_slot[n_d2d + k];
    pp.program.a(r, own) = -std::norm(cc.a[n]) * inv_noise * pp.scale[own];
    pp.program.a(r, other) = cfg.gamma_min_d2d * std::norm(cc.b(n, k)) * inv_noise * pp.scale[other];
    pp.program.b[r] = -cfg.gamma_min_d2d;
    ++r;
  }
  for (int k = 0; k < n_cu; ++k) {
    const int own = var_of_slot[n_d2d + k];
    pp.program.a(r, own) = -std::norm(cc.c[k]) * inv_noise * pp.scale[own];
    const int i = pairing.d2d_of(k);
    if (i >= 0) pp.program.a(r, var_of_slot[i]) = cfg.gamma_min_cu * std::norm(cc.d[i]) * inv_noise * pp.scale[var_of_slot[i]];
    pp.program.b[r] = -cfg.gamma_min_cu;
    ++r;
  }
  pp.program.lower = RVec::Zero(nv);
  pp.program.upper = RVec::Ones(nv);
  return pp;
}

RVec sca_power_step(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                    const SystemConfig& cfg, const SolverSettings& settings) {
  const RateLowerBound bound(alloc, pairing, ch, cfg);
  PowerProgram pp = power_constraints(alloc.theta, pairing, ch, cfg);
  pp.program.objective = pp.wrap([&bound](const RVec& p) {
    return ObjectiveEval{bound.value(p), bound.gradient(p), bound.hessian(p)};
  });
  const ConcaveSolution sol =
      solve_concave_linconstr(pp.program, pp.to_normalized(alloc.p), settings.power_tolerance, settings.barrier);
  if (sol.status == SolveStatus::Infeasible) throw InfeasibleError("power step: SINR floors cannot be met");
  return pp.to_watts(sol.x);
}

// ---------------------------------------------------------------------------
// Passive beamforming
// ---------------------------------------------------------------------------

SinrSet lagrangian_eta_update(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                              const SystemConfig& cfg) {
  return all_sinrs(alloc, pairing, ch, cfg);
}

double lagrangian_objective(const Allocation& alloc, const SinrSet& eta, const Pairing& pairing,
                            const ChannelRealization& ch, const SystemConfig& cfg) {
  double v = 0.0;
  for (int n : pairing.active_set()) v += std::log1p(eta.d2d[n]) - eta.d2d[n];
  for (int k = 0; k < pairing.num_cu(); ++k) v += std::log1p(eta.cu[k]) - eta.cu[k];
  return v + ratio_objective(alloc, eta, pairing, ch, cfg);
}

double ratio_objective(const Allocation& alloc, const SinrSet& eta, const Pairing& pairing,
                       const ChannelRealization& ch, const SystemConfig& cfg) {
  const SinrSet s = all_sinrs(alloc, pairing, ch, cfg);
  double v = 0.0;
  for (int n : pairing.active_set()) v += (1.0 + eta.d2d[n]) * s.d2d[n] / (1.0 + s.d2d[n]);
  for (int k = 0; k < pairing.num_cu(); ++k) v += (1.0 + eta.cu[k]) * s.cu[k] / (1.0 + s.cu[k]);
  return v;
}

CVec quadratic_y_update(const Allocation& alloc, const SinrSet& eta, const Pairing& pairing,
                        const ChannelRealization& ch, const SystemConfig& cfg) {
  check_sizes(alloc, ch);
  const CompositeChannels cc = composite_channels(alloc.theta, ch);
  const LinkPowers lp = link_powers(alloc, pairing, cc);
  const int n_d2d = pairing.num_d2d();
  CVec y = CVec::Zero(n_d2d + pairing.num_cu());
  for (int n : pairing.active_set()) {
    const double total = lp.signal_d2d[n] + lp.interf_d2d[n] + cfg.noise_power;
    y[n] = std::sqrt((1.0 + eta.d2d[n]) * alloc.p[n]) * cc.a[n] / total;
  }
  for (int k = 0; k < pairing.num_cu(); ++k) {
    const double total = lp.signal_cu[k] + lp.interf_cu[k] + cfg.noise_power;
    y[n_d2d + k] = std::sqrt((1.0 + eta.cu[k]) * alloc.p[n_d2d + k]) * cc.c[k] / total;
  }
  return y;
}

double quadratic_objective(const Allocation& alloc, const SinrSet& eta, const CVec& y, const Pairing& pairing,
                           const ChannelRealization& ch, const SystemConfig& cfg) {
  check_sizes(alloc, ch);
  const CompositeChannels cc = composite_channels(alloc.theta, ch);
  const LinkPowers lp = link_powers(alloc, pairing, cc);
  const int n_d2d = pairing.num_d2d();
  double v = 0.0;
  for (int n : pairing.active_set()) {
    const double s = std::sqrt((1.0 + eta.d2d[n]) * alloc.p[n]);
    v += 2.0 * s * std::real(std::conj(y[n]) * cc.a[n]) -
         std::norm(y[n]) * (lp.signal_d2d[n] + lp.interf_d2d[n] + cfg.noise_power);
  }
  for (int k = 0; k < pairing.num_cu(); ++k) {
    const cplx yk = y[n_d2d + k];
    const double s = std::sqrt((1.0 + eta.cu[k]) * alloc.p[n_d2d + k]);
    v += 2.0 * s * std::real(std::conj(yk) * cc.c[k]) -
         std::norm(yk) * (lp.signal_cu[k] + lp.interf_cu[k] + cfg.noise_power);
  }
  return v;
}

AuxX x_updates(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
               const SystemConfig& cfg) {
  check_sizes(alloc, ch);
  const CompositeChannels cc = composite_channels(alloc.theta, ch);
  const LinkPowers lp = link_powers(alloc, pairing, cc);
  const int n_d2d = pairing.num_d2d();
  AuxX x{CVec::Zero(n_d2d), CVec::Zero(pairing.num_cu())};
  for (int n : pairing.active_set()) {
    x.d2d[n] = std::sqrt(alloc.p[n]) * cc.a[n] / (lp.interf_d2d[n] + cfg.noise_power);
  }
  for (int k = 0; k < pairing.num_cu(); ++k) {
    x.cu[k] = std::sqrt(alloc.p[n_d2d + k]) * cc.c[k] / (lp.interf_cu[k] + cfg.noise_power);
  }
  return x;
}

double sinr_surrogate_d2d(int n, const Allocation& alloc, cplx x, const Pairing& pairing,
                          const ChannelRealization& ch, const SystemConfig& cfg) {
  const CompositeChannels cc = composite_channels(alloc.theta, ch);
  const LinkPowers lp = link_powers(alloc, pairing, cc);
  return 2.0 * std::sqrt(alloc.p[n]) * std::real(std::conj(x) * cc.a[n]) -
         std::norm(x) * (lp.interf_d2d[n] + cfg.noise_power);
}

double sinr_surrogate_cu(int k, const Allocation& alloc, cplx x, const Pairing& pairing,
                         const ChannelRealization& ch, const SystemConfig& cfg) {
  const CompositeChannels cc = composite_channels(alloc.theta, ch);
  const LinkPowers lp = link_powers(alloc, pairing, cc);
  return 2.0 * std::sqrt(alloc.p[pairing.num_d2d() + k]) * std::real(std::conj(x) * cc.c[k]) -
         std::norm(x) * (lp.interf_cu[k] + cfg.noise_power);
}

namespace {

// Adds weight · (P |θᴴω + h|²) to the negated quadratic part of `form`:
// B += weight·P ωωᴴ, e -= weight·P h* ω, c -= weight·P |h|².
void subtract_received(QuadraticForm& form, double weight, double power, const CVec& w, cplx h) {
  const double scale = weight * power;
  if (scale <= 0.0) return;
  form.add_outer(w, scale);
  form.linear() -= scale * std::conj(h) * w;
  form.constant() -= scale * std::norm(h);
}

// Adds 2 s Re(z* (θᴴω + h)) to `form`.
void add_cross(QuadraticForm& form, double s, cplx z, const CVec& w, cplx h) {
  form.linear() += s * std::conj(z) * w;
  form.constant() += 2.0 * s * std::real(std::conj(z) * h);
}

}  // namespace

QcqpProgram assemble_qcqp(const Allocation& alloc, const SinrSet& eta, const CVec& y, const AuxX& x,
                          const Pairing& pairing, const ChannelRealization& ch, const SystemConfig& cfg) {
  check_sizes(alloc, ch);
  const Eigen::Index m = ch.ris_elements();
  const int n_d2d = pairing.num_d2d();
  const double noise = cfg.noise_power;

  QcqpProgram prog{QuadraticForm(m), {}};
  QuadraticForm& obj = prog.objective;
  const CVec g_bs = ch.ris_bs;

  for (int n : pairing.active_set()) {
    const int k = pairing.cu_of(n);
    const double pd = alloc.p[n];
    const double pc = alloc.p[n_d2d + k];
    const CVec w_own = omega(ch.ris_rx[n], ch.tx_ris[n]);
    const CVec w_int = omega(ch.ris_rx[n], ch.cu_ris[k]);
    const cplx h = ch.d2d(n, n);
    const cplx v = ch.cu_rx(n, k);

    const double wy = std::norm(y[n]);
    add_cross(obj, std::sqrt((1.0 + eta.d2d[n]) * pd), y[n], w_own, h);
    subtract_received(obj, wy, pd, w_own, h);
    subtract_received(obj, wy, pc, w_int, v);
    obj.constant() -= wy * noise;

    QuadraticConstraint con{QuadraticForm(m), cfg.gamma_min_d2d};
    const double wx = std::norm(x.d2d[n]);
    add_cross(con.form, std::sqrt(pd), x.d2d[n], w_own, h);
    subtract_received(con.form, wx, pc, w_int, v);
    con.form.constant() -= wx * noise;
    prog.constraints.push_back(std::move(con));
  }

  for (int k = 0; k < pairing.num_cu(); ++k) {
    const double pc = alloc.p[n_d2d + k];
    const CVec w_own = omega(g_bs, ch.cu_ris[k]);
    const cplx h = ch.cu_bs[k];
    const int i = pairing.d2d_of(k);
    const cplx yk = y[n_d2d + k];

    const double wy = std::norm(yk);
    add_cross(obj, std::sqrt((1.0 + eta.cu[k]) * pc), yk, w_own, h);
    subtract_received(obj, wy, pc, w_own, h);
    if (i >= 0) subtract_received(obj, wy, alloc.p[i], omega(g_bs, ch.tx_ris[i]), ch.tx_bs[i]);
    obj.constant() -= wy * noise;

    QuadraticConstraint con{QuadraticForm(m), cfg.gamma_min_cu};
    const double wx = std::norm(x.cu[k]);
    add_cross(con.form, std::sqrt(pc), x.cu[k], w_own, h);
    if (i >= 0) subtract_received(con.form, wx, alloc.p[i], omega(g_bs, ch.tx_ris[i]), ch.tx_bs[i]);
    con.form.constant() -= wx * noise;
    prog.constraints.push_back(std::move(con));
  }
  return prog;
}

namespace {

bool floors_met(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                const SystemConfig& cfg) {
  return is_feasible(alloc, pairing, ch, cfg, FeasibleSet::F1);
}

// Doubling line search along the step from alloc.theta to `theta`, clipped
// to the unit polydisc. A candidate is kept only if it raises the exact sum
// rate and keeps every SINR floor, so ascent and feasibility are preserved.
CVec extrapolate(const Allocation& alloc, const CVec& theta, const Pairing& pairing, const ChannelRealization& ch,
                 const SystemConfig& cfg, int max_doublings) {
  const CVec step = theta - alloc.theta;
  Allocation trial = alloc;
  trial.theta = theta;
  double best = sum_rate(trial, pairing, ch, cfg);
  CVec best_theta = theta;
  double factor = 1.0;
  for (int i = 0; i < max_doublings; ++i) {
    factor *= 2.0;
    trial.theta = alloc.theta + factor * step;
    for (Eigen::Index m = 0; m < trial.theta.size(); ++m) {
      const double r = std::abs(trial.theta[m]);
      if (r > 1.0) trial.theta[m] /= r;
    }
    const double value = sum_rate(trial, pairing, ch, cfg);
    if (!(value > best) || !floors_met(trial, pairing, ch, cfg)) break;
    best = value;
    best_theta = trial.theta;
  }
  return best_theta;
}


// Doubling search along next - from in (p, θ), clipped to the power boxes
// and the unit polydisc. Returns the best point that raises the exact
// objective and keeps every floor; `next` itself when none does.
Allocation accelerate(const Allocation& next, double next_value, const Allocation& from, const Pairing& pairing,
                      const ChannelRealization& ch, const SystemConfig& cfg, const AlternatingHooks& hooks,
                      bool move_theta, int max_doublings, double& best_value) {
  const RVec dp = next.p - from.p;
  const CVec dt = next.theta - from.theta;
  const int n_d2d = pairing.num_d2d();
  Allocation best = next;
  best_value = next_value;
  Allocation trial = next;
  double factor = 0.0;
  for (int i = 0; i < max_doublings; ++i) {
    factor = factor == 0.0 ? 1.0 : 2.0 * factor;
    trial.p = next.p + factor * dp;
    for (Eigen::Index j = 0; j < trial.p.size(); ++j) {
      const double cap = j < n_d2d ? cfg.p_max_d2d : cfg.p_max_cu;
      trial.p[j] = std::clamp(trial.p[j], 0.0, cap);
    }
    if (move_theta) {
      trial.theta = next.theta + factor * dt;
      for (Eigen::Index m = 0; m < trial.theta.size(); ++m) {
        const double r = std::abs(trial.theta[m]);
        if (r > 1.0) trial.theta[m] /= r;
      }
    }
    const double value = hooks.objective(trial);
    if (!(value > best_value) || !floors_met(trial, pairing, ch, cfg)) break;
    best = trial;
    best_value = value;
  }
  return best;
}

}  // namespace

CVec beamforming_step(const Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch,
                      const SystemConfig& cfg, const SolverSettings& settings) {
  const SinrSet eta = lagrangian_eta_update(alloc, pairing, ch, cfg);
  const CVec y = quadratic_y_update(alloc, eta, pairing, ch, cfg);
  const AuxX x = x_updates(alloc, pairing, ch, cfg);
  QcqpProgram prog = assemble_qcqp(alloc, eta, y, x, pairing, ch, cfg);

  // Each SINR surrogate is divided by its current value (or the floor, if
  // larger) so constraint slacks are comparable in the barrier.
  const CVec start = alloc.theta.conjugate();
  for (auto& con : prog.constraints) {
    const double scale = std::max(con.form.value(start), con.floor);
    if (scale > 0.0) {
      con.form.scale(1.0 / scale);
      con.floor /= scale;
    }
  }

  const QcqpSolution sol = solve_qcqp(prog, start, settings.qcqp_tolerance, settings.barrier);
  if (sol.status == SolveStatus::Infeasible) throw InfeasibleError("beamforming step: SINR floors cannot be met");
  CVec theta = sol.theta.conjugate();
  if (settings.extrapolation_steps > 0 && floors_met(alloc, pairing, ch, cfg)) {
    theta = extrapolate(alloc, theta, pairing, ch, cfg, settings.extrapolation_steps);
  }
  return theta;
}

CVec project_f2(const CVec& theta) {
  CVec out(theta.size());
  for (Eigen::Index m = 0; m < theta.size(); ++m) {
    const double r = std::abs(theta[m]);
    out[m] = r > 0.0 ? theta[m] / r : cplx(1.0, 0.0);
  }
  return out;
}

CVec project_f3(const CVec& theta, int bits) {
  if (bits < 1) throw std::invalid_argument("project_f3: bits must be >= 1");
  const double levels = std::exp2(bits);
  const double step = 2.0 * std::numbers::pi / levels;
  CVec out(theta.size());
  for (Eigen::Index m = 0; m < theta.size(); ++m) {
    double phase = std::arg(theta[m]);
    if (phase < 0.0) phase += 2.0 * std::numbers::pi;
    const double t = phase / step;
    double idx = std::floor(t);
    if (t - idx > 0.5) idx += 1.0;  // exact ties stay on the smaller angle
    idx = std::fmod(idx, levels);
    out[m] = std::polar(1.0, idx * step);
  }
  return out;
}

CVec random_phases(Eigen::Index size, Rng& rng, int bits) {
  CVec out(size);
  if (bits > 0) {
    const auto levels = static_cast<std::uint64_t>(std::exp2(bits));
    std::uniform_int_distribution<std::uint64_t> pick(0, levels - 1);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(levels);
    for (Eigen::Index m = 0; m < size; ++m) out[m] = std::polar(1.0, step * static_cast<double>(pick(rng)));
  } else {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (Eigen::Index m = 0; m < size; ++m) out[m] = std::polar(1.0, phase(rng));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Alternating optimization
// ---------------------------------------------------------------------------

namespace {

// Alternates Phase-I-backed steps until the SINR floors hold.
bool restore(Allocation& alloc, const Pairing& pairing, const ChannelRealization& ch, const SystemConfig& cfg,
             bool optimize_theta, const AlternatingHooks& hooks, const SolverSettings& settings) {
  for (int round = 0; round < settings.restoration_rounds; ++round) {
    try {
      alloc.p = hooks.power_step(alloc);
    } catch (const InfeasibleError&) {
    }
    if (floors_met(alloc, pairing, ch, cfg)) return true;
    if (!optimize_theta) return false;
    try {
      alloc.theta = beamforming_step(alloc, pairing, ch, cfg, settings);
    } catch (const InfeasibleError&) {
    }
    if (floors_met(alloc, pairing, ch, cfg)) return true;
  }
  return false;
}

}  // namespace

SolveReport alternate(const Allocation& start, const Pairing& pairing, const ChannelRealization& ch,
                      const SystemConfig& cfg, FeasibleSet set, bool optimize_theta, const AlternatingHooks& hooks,
                      const SolverSettings& settings) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport report;
  report.pairing = pairing;
  report.feasible_set = set;
  report.init_seed = settings.init_seed;
  Allocation alloc = start;
  check_sizes(alloc, ch);

  auto finish = [&]() {
    report.allocation = alloc;
    report.objective = hooks.objective(alloc);
    report.sum_rate = sum_rate(alloc, pairing, ch, cfg);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
  };

  if (!floors_met(alloc, pairing, ch, cfg) && !restore(alloc, pairing, ch, cfg, optimize_theta, hooks, settings)) {
    report.feasible = false;
    report.note = "no feasible starting point";
    return finish();
  }

  double current = hooks.objective(alloc);
  report.trace.push_back(current);
  Allocation previous;
  bool have_previous = false;
  for (int it = 1; it <= settings.max_outer_iterations; ++it) {
    Allocation next = alloc;
    try {
      next.p = hooks.power_step(next);
      if (optimize_theta) next.theta = beamforming_step(next, pairing, ch, cfg, settings);
    } catch (const InfeasibleError&) {
      // Steps started from a feasible point cannot lose feasibility; a throw
      // here means numerical trouble, so keep the last good point.
      report.note = "step reported infeasible; kept previous iterate";
      break;
    }
    const double value = hooks.objective(next);
    report.iterations = it;
    if (!(value >= current) || !floors_met(next, pairing, ch, cfg)) {
      report.trace.push_back(current);
      break;
    }
    double accepted = value;
    if (settings.extrapolation_steps > 0) {
      // The alternating steps tend to zigzag, so the two-step displacement
      // is often a better direction than the last one.
      const Allocation& anchor = have_previous ? previous : alloc;
      next = accelerate(next, value, anchor, pairing, ch, cfg, hooks, optimize_theta, settings.extrapolation_steps,
                        accepted);
    }
    previous = alloc;
    have_previous = true;
    alloc = next;
    report.trace.push_back(accepted);
    const double gain = accepted - current;
    current = accepted;
    if (gain < settings.epsilon) break;
  }

  report.feasible_set = FeasibleSet::F1;
  report.feasible = is_feasible(alloc, pairing, ch, cfg, FeasibleSet::F1);
  finish();
  if (optimize_theta && set != FeasibleSet::F1) return project_solution(report, ch, cfg, set, hooks);
  if (!optimize_theta) {
    report.feasible_set = set;
    report.feasible = is_feasible(alloc, pairing, ch, cfg, set);
  }
  return report;
}

SolveReport project_solution(const SolveReport& f1, const ChannelRealization& ch, const SystemConfig& cfg,
                             FeasibleSet set, const AlternatingHooks& hooks) {
  SolveReport report = f1;
  report.feasible_set = set;
  if (set == FeasibleSet::F1) return report;
  const auto t0 = std::chrono::steady_clock::now();
  Allocation alloc = f1.allocation;
  alloc.theta = set == FeasibleSet::F2 ? project_f2(alloc.theta) : project_f3(alloc.theta, cfg.phase_bits);
  if (!floors_met(alloc, f1.pairing, ch, cfg)) {
    try {
      alloc.p = hooks.power_step(alloc);
    } catch (const InfeasibleError&) {
    }
  }
  report.allocation = alloc;
  report.objective = hooks.objective(alloc);
  report.sum_rate = sum_rate(alloc, f1.pairing, ch, cfg);
  report.feasible = f1.feasible && is_feasible(alloc, f1.pairing, ch, cfg, set);
  if (!report.feasible && report.note.empty()) report.note = "projected point violates an SINR floor";
  report.wall_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

SolveReport project_se(const SolveReport& f1, const ChannelRealization& ch, const SystemConfig& cfg, FeasibleSet set,
                       const SolverSettings& settings) {
  const Pairing& pairing = f1.pairing;
  return project_solution(f1, ch, cfg, set, se_hooks(pairing, ch, cfg, settings));
}

Allocation initial_allocation(const Pairing& pairing, const ChannelRealization& ch, const SystemConfig& cfg,
                              const SolverSettings& settings) {
  Allocation alloc;
  const int n_d2d = pairing.num_d2d();
  alloc.p = RVec::Zero(n_d2d + pairing.num_cu());
  for (int n : pairing.active_set()) alloc.p[n] = cfg.p_max_d2d;
  alloc.p.tail(pairing.num_cu()).setConstant(cfg.p_max_cu);
  Rng rng(settings.init_seed);
  alloc.theta = random_phases(ch.ris_elements(), rng);
  return alloc;
}

SolveReport maximize_se(const ChannelRealization& ch, const SystemConfig& cfg, FeasibleSet set,
                        const SolverSettings& settings) {
  return maximize_se(ch, cfg, set, rcs_pairing(ch), settings);
}

AlternatingHooks se_hooks(const Pairing& pairing, const ChannelRealization& ch, const SystemConfig& cfg,
                          const SolverSettings& settings) {
  AlternatingHooks hooks;
  hooks.objective = [&pairing, &ch, &cfg](const Allocation& a) { return sum_rate(a, pairing, ch, cfg); };
  hooks.power_step = [&pairing, &ch, &cfg, settings](const Allocation& a) {
    return sca_power_step(a, pairing, ch, cfg, settings);
  };
  return hooks;
}

SolveReport maximize_se(const ChannelRealization& ch, const SystemConfig& cfg, FeasibleSet set,
                        const Pairing& pairing, const SolverSettings& settings) {
  return alternate(initial_allocation(pairing, ch, cfg, settings), pairing, ch, cfg, set, true,
                   se_hooks(pairing, ch, cfg, settings), settings);
}

}  // namespace risd2d
