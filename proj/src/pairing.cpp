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

#include "risd2d/pairing.hpp"

#include "risd2d/errors.hpp"

#include <stdexcept>
#include <string>

namespace risd2d {

Pairing::Pairing(int num_d2d, int num_cu) {
  if (num_d2d < 0 || num_cu < 0) throw std::invalid_argument("Pairing: negative size");
  cu_of_d2d_.assign(num_d2d, -1);
  d2d_of_cu_.assign(num_cu, -1);
}

Pairing Pairing::from_d2d_view(const std::vector<int>& cu_of_d2d, int num_cu) {
  Pairing p(static_cast<int>(cu_of_d2d.size()), num_cu);
  for (int n = 0; n < p.num_d2d(); ++n) {
    if (cu_of_d2d[n] >= 0) p.pair(cu_of_d2d[n], n);
  }
  return p;
}

void Pairing::pair(int cu, int d2d) {
  if (cu < 0 || cu >= num_cu() || d2d < 0 || d2d >= num_d2d())
    throw std::invalid_argument("Pairing::pair: index out of range");
  if (d2d_of_cu_[cu] >= 0 || cu_of_d2d_[d2d] >= 0)
    throw std::invalid_argument("Pairing::pair: CU " + std::to_string(cu) + " or D2D " + std::to_string(d2d) +
                                " already paired");
  d2d_of_cu_[cu] = d2d;
  cu_of_d2d_[d2d] = cu;
}

std::vector<int> Pairing::active_set() const {
  std::vector<int> out;
  for (int n = 0; n < num_d2d(); ++n) {
    if (is_active(n)) out.push_back(n);
  }
  return out;
}

std::size_t Pairing::size() const { return active_set().size(); }

double rcs_term(const ChannelRealization& ch, int cu, int d2d) {
  const double v = std::norm(ch.cu_rx(d2d, cu));
  const double u = std::norm(ch.tx_bs[d2d]);
  if (v == 0.0 || u == 0.0) {
    throw DegenerateChannelError("RCS score undefined: zero interference channel for CU " + std::to_string(cu) +
                                 ", D2D " + std::to_string(d2d));
  }
  return std::norm(ch.cu_bs[cu]) / v + std::norm(ch.d2d(d2d, d2d)) / u;
}

double rcs_score(const Pairing& pairing, const ChannelRealization& ch) {
  double s = 0.0;
  for (int n : pairing.active_set()) s += rcs_term(ch, pairing.cu_of(n), n);
  return s;
}

std::size_t pairing_count(int num_d2d, int num_cu, std::size_t cap) {
  std::size_t count = 1;
  for (int i = 0; i < num_d2d; ++i) {
    count *= static_cast<std::size_t>(num_cu - i);
    if (count > cap) return cap + 1;
  }
  return count;
}

namespace {

void check_sizes(int num_d2d, int num_cu) {
  if (num_d2d < 1 || num_cu < num_d2d)
    throw std::invalid_argument("pairing needs K >= N >= 1, got N=" + std::to_string(num_d2d) +
                                ", K=" + std::to_string(num_cu));
}

// Visits injective maps in lexicographic order of the D2D-indexed tuple.
template <class Visit>
void for_each_pairing(int num_d2d, int num_cu, Visit&& visit) {
  std::vector<int> tuple(num_d2d, -1);
  std::vector<bool> used(num_cu, false);
  auto recurse = [&](auto&& self, int n) -> void {
    if (n == num_d2d) {
      visit(tuple);
      return;
    }
    for (int k = 0; k < num_cu; ++k) {
      if (used[k]) continue;
      used[k] = true;
      tuple[n] = k;
      self(self, n + 1);
      used[k] = false;
    }
  };
  recurse(recurse, 0);
}

}  // namespace

std::vector<Pairing> enumerate_pairings(int num_d2d, int num_cu, std::size_t cap) {
  check_sizes(num_d2d, num_cu);
  const std::size_t count = pairing_count(num_d2d, num_cu, cap);
  if (count > cap) {
    throw SizeError("pairing enumeration for N=" + std::to_string(num_d2d) + ", K=" + std::to_string(num_cu) +
                    " exceeds the cap of " + std::to_string(cap));
  }
  std::vector<Pairing> out;
  out.reserve(count);
  for_each_pairing(num_d2d, num_cu, [&](const std::vector<int>& t) { out.push_back(Pairing::from_d2d_view(t, num_cu)); });
  return out;
}

Pairing rcs_pairing(const ChannelRealization& ch) {
  const int n = ch.num_d2d();
  const int k = ch.num_cu();
  check_sizes(n, k);
  // Per-pair scores first so the degenerate-channel check covers every pair.
  RMat term(n, k);
  for (int l = 0; l < n; ++l) {
    for (int c = 0; c < k; ++c) term(l, c) = rcs_term(ch, c, l);
  }
  std::vector<int> best;
  double best_score = -1.0;
  for_each_pairing(n, k, [&](const std::vector<int>& t) {
    double s = 0.0;
    for (int l = 0; l < n; ++l) s += term(l, t[l]);
    if (s > best_score) {  // strict: earlier tuples win ties
      best_score = s;
      best = t;
    }
  });
  return Pairing::from_d2d_view(best, k);
}

}  // namespace risd2d
