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

#include <cstdint>
#include <random>

#include "rismimo/linalg.hpp"

namespace rismimo {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for an independent stream keyed by (master seed, trial, stream).
/// Streams of different trials never share state, so trials can be drawn in
/// any order or on any thread and still reproduce bit for bit.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                                 std::uint64_t stream) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (trial * 0xD1B54A32D192ED03ULL));
  h = splitmix64(h ^ (stream * 0x8CB92BA72F3D8DD7ULL + 0x2545F4914F6CDD1DULL));
  return h;
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t master, std::uint64_t trial,
                          std::uint64_t stream) {
  return Engine(derive_seed(master, trial, stream));
}

/// Fills `out` with i.i.d. CN(0, variance) entries.
template <typename Derived>
void fill_complex_gaussian(Engine& rng, Eigen::MatrixBase<Derived>& out,
                           double variance = 1.0) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  for (Eigen::Index j = 0; j < out.cols(); ++j)
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      out(i, j) = cdouble(re, im);
    }
}

inline CMatrix complex_gaussian(Engine& rng, Eigen::Index rows, Eigen::Index cols,
                                double variance = 1.0) {
  CMatrix m(rows, cols);
  fill_complex_gaussian(rng, m, variance);
  return m;
}

inline CVector complex_gaussian_vector(Engine& rng, Eigen::Index n,
                                       double variance = 1.0) {
  CVector v(n);
  fill_complex_gaussian(rng, v, variance);
  return v;
}

}  // namespace rismimo
