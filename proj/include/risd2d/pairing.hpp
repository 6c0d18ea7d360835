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

#include <cstddef>
#include <vector>

namespace risd2d {

/// Partial injective CU -> D2D reuse map. D2D link n is active when a CU
/// shares its spectrum with it.
class Pairing {
 public:
  Pairing() = default;
  Pairing(int num_d2d, int num_cu);

  /// Pairing where D2D link n reuses CU cu_of_d2d[n] (-1 leaves it idle).
  static Pairing from_d2d_view(const std::vector<int>& cu_of_d2d, int num_cu);

  /// Throws std::invalid_argument if either side is already paired.
  void pair(int cu, int d2d);

  int num_d2d() const { return static_cast<int>(cu_of_d2d_.size()); }
  int num_cu() const { return static_cast<int>(d2d_of_cu_.size()); }
  /// -1 when unpaired.
  int cu_of(int d2d) const { return cu_of_d2d_.at(d2d); }
  int d2d_of(int cu) const { return d2d_of_cu_.at(cu); }
  bool is_active(int d2d) const { return cu_of(d2d) >= 0; }
  std::vector<int> active_set() const;
  std::size_t size() const;

  const std::vector<int>& cu_of_d2d() const { return cu_of_d2d_; }

  friend bool operator==(const Pairing&, const Pairing&) = default;

 private:
  std::vector<int> cu_of_d2d_;
  std::vector<int> d2d_of_cu_;
};

/// |h̃_k|²/|v_{n,k}|² + |h_{n,n}|²/|u_n|², the reuse score of CU k on link n.
/// Throws DegenerateChannelError when |v_{n,k}| or |u_n| is zero.
double rcs_term(const ChannelRealization& ch, int cu, int d2d);

double rcs_score(const Pairing& pairing, const ChannelRealization& ch);

/// Number of injective maps from N D2D links into K CUs, K!/(K-N)!, or
/// `cap + 1` if larger than `cap`.
std::size_t pairing_count(int num_d2d, int num_cu, std::size_t cap = 1'000'000);

/// Every full pairing in lexicographic order of cu_of_d2d. Throws SizeError
/// when the count exceeds `cap`, std::invalid_argument unless K >= N >= 1.
std::vector<Pairing> enumerate_pairings(int num_d2d, int num_cu, std::size_t cap = 1'000'000);

/// The full pairing with the largest total RCS score; ties go to the
/// lexicographically smallest cu_of_d2d tuple.
Pairing rcs_pairing(const ChannelRealization& ch);

}  // namespace risd2d
