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

// Independent re-implementations used as test oracles. Nothing here calls
// into the optimizer; composite channels are summed element by element.

#include "risd2d/channel.hpp"
#include "risd2d/pairing.hpp"
#include "risd2d/se_optimizer.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace oracle {

using risd2d::Allocation;
using risd2d::ChannelRealization;
using risd2d::CVec;
using risd2d::Pairing;
using risd2d::RVec;
using risd2d::SystemConfig;
using cplx = std::complex<double>;

/// Every coefficient set to `value`; N D2D links, K CUs, M elements.
inline ChannelRealization constant_channels(int n, int k, int m, cplx value) {
  ChannelRealization ch;
  ch.d2d = risd2d::CMat::Constant(n, n, value);
  ch.cu_bs = CVec::Constant(k, value);
  ch.tx_bs = CVec::Constant(n, value);
  ch.cu_rx = risd2d::CMat::Constant(n, k, value);
  ch.ris_bs = CVec::Constant(m, value);
  for (int i = 0; i < n; ++i) {
    ch.tx_ris.push_back(CVec::Constant(m, value));
    ch.ris_rx.push_back(CVec::Constant(m, value));
  }
  for (int i = 0; i < k; ++i) ch.cu_ris.push_back(CVec::Constant(m, value));
  return ch;
}

/// Σ_m conj(g_m) β_m f_m + direct, written as an explicit loop.
inline cplx path(const CVec& g, const CVec& beta, const CVec& f, cplx direct) {
  cplx acc = direct;
  for (Eigen::Index m = 0; m < beta.size(); ++m) acc += std::conj(g[m]) * beta[m] * f[m];
  return acc;
}

inline double sinr_d2d(int n, const Allocation& a, const Pairing& pr, const ChannelRealization& ch, double noise) {
  const int k = pr.cu_of(n);
  const int nd = pr.num_d2d();
  const double sig = a.p[n] * std::norm(path(ch.ris_rx[n], a.theta, ch.tx_ris[n], ch.d2d(n, n)));
  double interf = 0.0;
  if (k >= 0) interf = a.p[nd + k] * std::norm(path(ch.ris_rx[n], a.theta, ch.cu_ris[k], ch.cu_rx(n, k)));
  return sig / (interf + noise);
}

inline double sinr_cu(int k, const Allocation& a, const Pairing& pr, const ChannelRealization& ch, double noise) {
  const int nd = pr.num_d2d();
  const double sig = a.p[nd + k] * std::norm(path(ch.ris_bs, a.theta, ch.cu_ris[k], ch.cu_bs[k]));
  const int i = pr.d2d_of(k);
  double interf = 0.0;
  if (i >= 0) interf = a.p[i] * std::norm(path(ch.ris_bs, a.theta, ch.tx_ris[i], ch.tx_bs[i]));
  return sig / (interf + noise);
}

inline double sum_rate(const Allocation& a, const Pairing& pr, const ChannelRealization& ch, double noise) {
  double r = 0.0;
  for (int n = 0; n < pr.num_d2d(); ++n) {
    if (pr.cu_of(n) >= 0) r += std::log2(1.0 + sinr_d2d(n, a, pr, ch, noise));
  }
  for (int k = 0; k < pr.num_cu(); ++k) r += std::log2(1.0 + sinr_cu(k, a, pr, ch, noise));
  return r;
}

/// Powers uniform in [0.2, 1]·p_max on active entries, coefficients uniform
/// in the unit disc.
inline Allocation random_allocation(const Pairing& pr, const SystemConfig& cfg, int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Allocation a;
  a.p = RVec::Zero(pr.num_d2d() + pr.num_cu());
  for (int n = 0; n < pr.num_d2d(); ++n) {
    if (pr.cu_of(n) >= 0) a.p[n] = cfg.p_max_d2d * (0.2 + 0.8 * u(rng));
  }
  for (int k = 0; k < pr.num_cu(); ++k) a.p[pr.num_d2d() + k] = cfg.p_max_cu * (0.2 + 0.8 * u(rng));
  a.theta.resize(m);
  for (int i = 0; i < m; ++i) a.theta[i] = std::polar(std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
  return a;
}

}  // namespace oracle
