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

#include <doctest.h>

#include "risd2d/errors.hpp"
#include "risd2d/pairing.hpp"

#include <algorithm>
#include <numeric>
#include <set>

using namespace risd2d;

namespace {

// Hand-built realization with unit cross links; only the scalar channels the
// RCS score reads are filled.
ChannelRealization scalar_channels(int n, int k) {
  ChannelRealization ch;
  ch.d2d = CMat::Ones(n, n);
  ch.cu_bs = CVec::Ones(k);
  ch.tx_bs = CVec::Ones(n);
  ch.cu_rx = CMat::Ones(n, k);
  ch.ris_bs = CVec::Zero(1);
  return ch;
}

// Brute force over permutations of the CU indices; the first N entries of
// each permutation form a candidate pairing.
double best_score_by_permutation(const ChannelRealization& ch) {
  const int n = ch.num_d2d();
  const int k = ch.num_cu();
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1.0;
  do {
    double s = 0.0;
    for (int l = 0; l < n; ++l) {
      const int c = perm[l];
      s += std::norm(ch.cu_bs[c]) / std::norm(ch.cu_rx(l, c)) + std::norm(ch.d2d(l, l)) / std::norm(ch.tx_bs[l]);
    }
    best = std::max(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("pairing structure stays injective") {
  Pairing p(2, 4);
  p.pair(3, 0);
  CHECK(p.cu_of(0) == 3);
  CHECK(p.d2d_of(3) == 0);
  CHECK(p.is_active(0));
  CHECK_FALSE(p.is_active(1));
  CHECK(p.active_set() == std::vector<int>{0});
  CHECK_THROWS_AS(p.pair(3, 1), std::invalid_argument);
  CHECK_THROWS_AS(p.pair(1, 0), std::invalid_argument);
}

TEST_CASE("enumeration counts") {
  CHECK(enumerate_pairings(1, 3).size() == 3);
  CHECK(enumerate_pairings(2, 4).size() == 12);
  CHECK(enumerate_pairings(2, 2).size() == 2);
  CHECK(pairing_count(5, 10) == 30240);
  CHECK_THROWS_AS(enumerate_pairings(6, 12, 1000), SizeError);
  CHECK_THROWS_AS(enumerate_pairings(3, 2), std::invalid_argument);

  const auto all = enumerate_pairings(3, 5);
  std::set<std::vector<int>> distinct;
  for (const auto& p : all) {
    distinct.insert(p.cu_of_d2d());
    CHECK(p.size() == 3);
  }
  CHECK(distinct.size() == all.size());
  CHECK(std::is_sorted(all.begin(), all.end(),
                       [](const Pairing& a, const Pairing& b) { return a.cu_of_d2d() < b.cu_of_d2d(); }));
}

TEST_CASE("RCS picks the CU with the larger score") {
  // CU 1 scores 5, CU 2 scores 7 on D2D link 1.
  ChannelRealization ch = scalar_channels(1, 2);
  ch.d2d(0, 0) = 1.0;  // |h|²/|u|² = 1 for both
  ch.cu_bs[0] = 2.0;   // 4 + 1 = 5
  ch.cu_bs[1] = std::sqrt(6.0);
  const Pairing p = rcs_pairing(ch);
  CHECK(p.cu_of(0) == 1);
  CHECK(rcs_score(p, ch) == doctest::Approx(7.0));
}

TEST_CASE("RCS ties resolve to the lexicographically smallest tuple") {
  const Pairing p = rcs_pairing(scalar_channels(2, 4));
  CHECK(p.cu_of_d2d() == std::vector<int>{0, 1});
}

TEST_CASE("RCS matches exhaustive search on random draws") {
  SystemConfig cfg = default_topology();
  cfg.ris_elements = 1;
  for (int count : {2, 4, 6}) {
    set_cu_count(cfg, count);
    Rng rng(100 + count);
    for (int r = 0; r < 50; ++r) {
      const auto ch = draw_realization(cfg, rng);
      const Pairing p = rcs_pairing(ch);
      CHECK(p.size() == 2);
      CHECK(rcs_score(p, ch) == doctest::Approx(best_score_by_permutation(ch)).epsilon(1e-12));
      const auto all = enumerate_pairings(2, count);
      CHECK(std::find(all.begin(), all.end(), p) != all.end());
    }
  }
}

TEST_CASE("RCS choice is invariant to a common channel scale") {
  SystemConfig cfg = default_topology();
  cfg.ris_elements = 1;
  Rng rng(9);
  for (int r = 0; r < 20; ++r) {
    auto ch = draw_realization(cfg, rng);
    const Pairing before = rcs_pairing(ch);
    ch.d2d *= 1e3;
    ch.cu_bs *= 1e3;
    ch.tx_bs *= 1e3;
    ch.cu_rx *= 1e3;
    CHECK(rcs_pairing(ch) == before);
  }
}

TEST_CASE("zero interference channel is rejected") {
  ChannelRealization ch = scalar_channels(1, 2);
  ch.cu_rx(0, 1) = 0.0;
  CHECK_THROWS_AS(rcs_pairing(ch), DegenerateChannelError);
}
