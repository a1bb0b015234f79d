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

#pragma once

#include <stdexcept>
#include <string>

namespace rismimo {

// Precondition violation on a public entry point.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A correlation matrix whose smallest eigenvalue is below the clamping floor.
class NotPsdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A rate/DEP target that the finite-blocklength rate cannot reach.
class InfeasibleTargetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Derived state used with a phase vector other than the one it was built for.
class StaleStateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// SCA exponent rho - alpha * rho_hat is not positive (SINR below validity threshold).
class CoefficientDegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative solver ran out of iterations or lost numerical accuracy.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace detail
}  // namespace rismimo
