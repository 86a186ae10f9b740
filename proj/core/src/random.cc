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

#include "xmrag/random.h"

#include <cmath>
#include <numbers>

namespace xmrag {

std::uint64_t Rng::Below(std::uint64_t n) {
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::Normal() {
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<float> Rng::UnitVector(std::size_t dim) {
  std::vector<double> g(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto &x : g) {
      x = Normal();
      norm2 += x * x;
    }
  } while (norm2 < 1e-12);
  const double inv = 1.0 / std::sqrt(norm2);
  std::vector<float> out(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    out[i] = static_cast<float>(g[i] * inv);
  }
  return out;
}

}  // namespace xmrag
