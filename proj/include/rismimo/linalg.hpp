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
#include <complex>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "rismimo/error.hpp"

namespace rismimo {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kLn2 = std::numbers::ln2;

/// Tr{A B} computed as sum(A .* B^T), O(n^2).
inline cdouble trace_product(const CMatrix& a, const CMatrix& b) {
  return a.cwiseProduct(b.transpose()).sum();
}

/// Real part of a quantity that is real in exact arithmetic. Throws
/// NumericalFailure when the imaginary residue exceeds `rel_tol` relative to
/// max(|z|, `scale`).
inline double real_checked(cdouble z, double rel_tol = 1e-8, double scale = 0.0,
                           const char* what = "trace") {
  const double ref = std::max(std::abs(z), scale);
  if (ref > 0.0 && std::abs(z.imag()) > rel_tol * ref + 1e-300) {
    throw NumericalFailure(std::string(what) + ": imaginary residue " +
                           std::to_string(z.imag()) + " exceeds tolerance");
  }
  return z.real();
}

inline double hermitian_defect(const CMatrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

// FNV-1a over raw bytes.
inline std::uint64_t fnv1a(const void* data, std::size_t size,
                           std::uint64_t h = 1469598103934665603ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace rismimo
