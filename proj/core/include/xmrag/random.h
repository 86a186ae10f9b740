// Copyright 2026 The xmrag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace xmrag {

/*! Seeded generator with platform-independent derived distributions.
 *
 *  std::mt19937_64 output is fully specified by the standard, but the
 *  std::*_distribution adaptors are not, so the helpers below are built
 *  directly on the raw 64-bit stream.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  //! Uniform in [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  //! Uniform integer in [0, n). n must be > 0.
  std::uint64_t Below(std::uint64_t n);

  //! Standard normal via Box-Muller (one value per call, no caching).
  double Normal();

  bool Bernoulli(double p) { return Uniform() < p; }

  template <typename T>
  void Shuffle(std::vector<T> &v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(Below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  //! Random unit vector of dimension `dim` (Gaussian direction).
  std::vector<float> UnitVector(std::size_t dim);

 private:
  std::mt19937_64 engine_;
};

}  // namespace xmrag
