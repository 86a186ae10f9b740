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

#include <cstdint>
#include <vector>

#include "xmrag/adapter.h"
#include "xmrag/contrastive.h"
#include "xmrag/feature_io.h"

namespace xmrag {

struct TrainConfig {
  double tau = 0.07;
  double learning_rate = 5e-5;
  int epochs = 10;
  int step_size = 3;    //!< epochs between learning-rate decays
  double decay = 0.6;   //!< multiplicative decay per step
  int batch_size = 20;
  std::uint64_t seed = 0;
  ContrastiveVariant variant = ContrastiveVariant::kSummedPositives;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  //! Throws UsageError on tau <= 0, decay outside (0, 1], or non-positive
  //! epochs / step size / batch size, or negative learning rate.
  void Validate() const;

  //! Learning rate used during zero-based `epoch`.
  double LearningRateAt(int epoch) const;
};

//! One aligned (image, subquery) pair.
struct PairExample {
  FeatureMatrix x;
  std::vector<float> t;
  int label = 0;
};

struct TrainResult {
  AdapterParams params;
  //! Mean of the per-batch mean losses, one value per epoch.
  std::vector<double> epoch_loss;
};

/*! Adam with a step learning-rate schedule on the in-batch contrastive loss.
 *
 *  The dataset is shuffled once (from `config.seed`) into fixed batches that
 *  are revisited in the same order every epoch. Parameters are initialized
 *  with InitAdapterParams(shape, seed). Single-threaded and bitwise
 *  deterministic for a given seed.
 */
TrainResult TrainAdapter(const std::vector<PairExample> &dataset,
                         const AdapterShape &shape, const TrainConfig &config);

//! Same, starting from `initial`.
TrainResult TrainAdapter(const std::vector<PairExample> &dataset,
                         AdapterParams initial, const TrainConfig &config);

}  // namespace xmrag
