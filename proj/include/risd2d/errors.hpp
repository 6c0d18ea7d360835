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

#include <stdexcept>
#include <string>

namespace risd2d {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (e.g. a zero distance).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Parameter outside a tabulated or supported range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Combinatorial search space larger than the configured cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// A channel coefficient that must be non-zero is exactly zero.
class DegenerateChannelError : public Error {
 public:
  using Error::Error;
};

/// No point satisfies the SINR floors for the current subproblem.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace risd2d
