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

#include <span>
#include <vector>

#include "xmrag/adapter.h"

namespace xmrag {

enum class ContrastiveVariant {
  //! One term per anchor; its numerator sums over every positive pair.
  kSummedPositives,
  //! One term per positive pair, averaged over the anchor's positives.
  kPerPair,
};

/*! -log(sum_pos e^{s/tau} / (sum_pos e^{s/tau} + sum_neg e^{s/tau})).
 *  Stable for any similarity range. Throws UsageError if `pos` is empty or
 *  tau <= 0.
 */
double InfoNceLoss(std::span<const double> pos, std::span<const double> neg,
                   double tau);

/*! Same value; additionally writes d(loss)/d(s) for every similarity into
 *  `d_pos` and `d_neg` (resized to match).
 */
double InfoNceLossWithGrad(std::span<const double> pos, std::span<const double> neg,
                           double tau, std::vector<double> &d_pos,
                           std::vector<double> &d_neg,
                           ContrastiveVariant variant = ContrastiveVariant::kSummedPositives);

//! Aligned (image, subquery) pairs. Equal labels mark positives.
template <typename T>
struct ContrastiveBatch {
  std::vector<Mat<T>> x;  // each L x d_v
  std::vector<Mat<T>> t;  // each 1 x d_t, unit norm
  std::vector<int> labels;

  std::size_t size() const { return x.size(); }
};

struct BatchLoss {
  double summed = 0.0;
  double mean = 0.0;
};

/*! In-batch contrastive loss.
 *
 *  For anchor image a, s_ab = <f(x_a, t_b), t_b> for every b in the batch;
 *  b is a positive of a when labels agree (b = a included) and a negative
 *  otherwise. The per-anchor InfoNCE terms are summed (`summed`) and
 *  averaged (`mean`). When `grad` is non-null it receives the gradient of
 *  `mean` with respect to every parameter (overwritten, not accumulated).
 */
template <typename T>
BatchLoss ContrastiveLoss(const AdapterParamsT<T> &p, const ContrastiveBatch<T> &batch,
                          double tau, ContrastiveVariant variant, AdapterParamsT<T> *grad);

}  // namespace xmrag
