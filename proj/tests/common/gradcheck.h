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

// Central finite-difference check of the adapter + InfoNCE gradient in
// 64-bit arithmetic. Shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "xmrag/adapter.h"
#include "xmrag/contrastive.h"
#include "xmrag/random.h"

namespace xmrag::testing {

struct GradCase {
  AdapterShape shape;
  int tokens = 3;  // L
  int batch = 4;
};

inline std::vector<GradCase> GradCheckCases() {
  return {
      {{6, 5, 4, 2, 3, 8, 5}, 3, 4},
      {{5, 4, 6, 3, 2, 6, 0}, 4, 3},
      {{4, 6, 8, 4, 4, 10, 6}, 2, 5},
  };
}

struct GradCheckResult {
  std::size_t checked = 0;   // components with |g| above the threshold
  std::size_t skipped = 0;
  double max_rel_error = 0.0;
  std::string worst;         // tensor[index] of the largest error
};

inline ContrastiveBatch<double> RandomBatch(const GradCase &c, Rng &rng) {
  ContrastiveBatch<double> batch;
  const int classes = std::max(1, c.batch - 1);  // forces one repeated label
  for (int i = 0; i < c.batch; ++i) {
    Mat<double> x(c.tokens, c.shape.vision_dim);
    for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = rng.Normal();
    const auto t = rng.UnitVector(static_cast<std::size_t>(c.shape.text_dim));
    batch.x.push_back(std::move(x));
    batch.t.push_back(RowVector<double>(t));
    batch.labels.push_back(i % classes);
  }
  return batch;
}

inline AdapterParamsT<double> RandomParams(const AdapterShape &shape, Rng &rng) {
  auto p = InitAdapterParams<double>(shape, rng.NextU64());
  // Move biases and layer-norm affine away from their special init values.
  for (Mat<double> *m : {&p.b1, &p.b2, &p.ln_beta}) {
    for (Eigen::Index k = 0; k < m->size(); ++k) m->data()[k] = 0.1 * rng.Normal();
  }
  for (Eigen::Index k = 0; k < p.ln_gamma.size(); ++k) p.ln_gamma.data()[k] = 1.0 + 0.1 * rng.Normal();
  return p;
}

inline GradCheckResult RunGradCheck(const GradCase &c, std::uint64_t seed,
                                    ContrastiveVariant variant, double tau = 0.07,
                                    double step = 1e-5, double threshold = 1e-8) {
  Rng rng(seed);
  AdapterParamsT<double> p = RandomParams(c.shape, rng);
  const ContrastiveBatch<double> batch = RandomBatch(c, rng);
  AdapterParamsT<double> grad;
  ContrastiveLoss(p, batch, tau, variant, &grad);

  GradCheckResult r;
  auto analytic = grad.Tensors();
  std::size_t t = 0;
  p.ForEach([&](const char *name, Mat<double> &m) {
    const Mat<double> &g = *analytic[t++];
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      const double saved = m.data()[k];
      m.data()[k] = saved + step;
      const double plus = ContrastiveLoss<double>(p, batch, tau, variant, nullptr).mean;
      m.data()[k] = saved - step;
      const double minus = ContrastiveLoss<double>(p, batch, tau, variant, nullptr).mean;
      m.data()[k] = saved;
      const double fd = (plus - minus) / (2.0 * step);
      const double a = g.data()[k];
      if (std::abs(a) <= threshold) {
        ++r.skipped;
        continue;
      }
      ++r.checked;
      const double rel = std::abs(a - fd) / std::max(std::abs(a), std::abs(fd));
      if (rel > r.max_rel_error) {
        r.max_rel_error = rel;
        r.worst = std::string(name) + "[" + std::to_string(k) + "]";
      }
    }
  });
  return r;
}

}  // namespace xmrag::testing
