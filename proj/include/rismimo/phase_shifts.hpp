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

#include <cmath>
#include <cstdint>

#include "rismimo/linalg.hpp"

namespace rismimo {

/// Real RIS phase vector theta; the reflection matrix is diag(e^{j theta}).
/// Values are kept unwrapped so line searches never see a 2*pi jump.
class PhaseShifts {
 public:
  PhaseShifts() = default;
  explicit PhaseShifts(RVector theta) : theta_(std::move(theta)) {}

  static PhaseShifts zeros(int n) { return PhaseShifts(RVector::Zero(n)); }

  int size() const { return static_cast<int>(theta_.size()); }
  const RVector& values() const { return theta_; }

  /// b = e^{j theta}
  CVector phasors() const {
    CVector b(theta_.size());
    for (Eigen::Index n = 0; n < theta_.size(); ++n) b(n) = std::polar(1.0, theta_(n));
    return b;
  }

  /// Every entry reduced to [0, 2*pi).
  PhaseShifts wrapped() const {
    RVector t = theta_;
    for (Eigen::Index n = 0; n < t.size(); ++n) {
      t(n) = std::fmod(t(n), kTwoPi);
      if (t(n) < 0.0) t(n) += kTwoPi;
      if (t(n) >= kTwoPi) t(n) = 0.0;
    }
    return PhaseShifts(std::move(t));
  }

  /// Hash of the exact bit pattern; ties derived state to this phase vector.
  std::uint64_t stamp() const {
    const auto n = static_cast<std::uint64_t>(theta_.size());
    std::uint64_t h = fnv1a(&n, sizeof n);
    return fnv1a(theta_.data(), sizeof(double) * theta_.size(), h);
  }

 private:
  RVector theta_;
};

}  // namespace rismimo
