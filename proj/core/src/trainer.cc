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

#include "xmrag/trainer.h"

#include <cmath>
#include <numeric>

#include "xmrag/error.h"
#include "xmrag/random.h"

namespace xmrag {

namespace {

// Seeds for the two independent random streams drawn from config.seed.
constexpr std::uint64_t kInitStream = 0x5eed0001;
constexpr std::uint64_t kShuffleStream = 0x5eed0002;

}  // namespace

void TrainConfig::Validate() const {
  if (!(tau > 0.0)) throw UsageError("tau must be > 0");
  if (!(decay > 0.0 && decay <= 1.0)) throw UsageError("decay must be in (0, 1]");
  if (epochs < 1) throw UsageError("epochs must be >= 1");
  if (step_size < 1) throw UsageError("step size must be >= 1");
  if (batch_size < 1) throw UsageError("batch size must be >= 1");
  if (!(learning_rate >= 0.0)) throw UsageError("learning rate must be >= 0");
}

double TrainConfig::LearningRateAt(int epoch) const {
  return learning_rate * std::pow(decay, epoch / step_size);
}

TrainResult TrainAdapter(const std::vector<PairExample> &dataset,
                         const AdapterShape &shape, const TrainConfig &config) {
  return TrainAdapter(dataset, InitAdapterParams<float>(shape, config.seed ^ kInitStream),
                      config);
}

TrainResult TrainAdapter(const std::vector<PairExample> &dataset,
                         AdapterParams initial, const TrainConfig &config) {
  config.Validate();
  if (dataset.empty()) throw DataError("training dataset is empty");
  initial.Validate();

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.seed ^ kShuffleStream);
  rng.Shuffle(order);

  std::vector<ContrastiveBatch<float>> batches;
  for (std::size_t start = 0; start < order.size();
       start += static_cast<std::size_t>(config.batch_size)) {
    ContrastiveBatch<float> batch;
    const std::size_t end =
        std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
    for (std::size_t i = start; i < end; ++i) {
      const PairExample &ex = dataset[order[i]];
      batch.x.push_back(ToMat<float>(ex.x));
      batch.t.push_back(RowVector<float>(ex.t));
      batch.labels.push_back(ex.label);
    }
    batches.push_back(std::move(batch));
  }

  TrainResult result;
  result.params = std::move(initial);
  AdapterParams m = AdapterParams::Zeros(result.params.shape);
  AdapterParams v = AdapterParams::Zeros(result.params.shape);
  AdapterParams grad;
  const auto b1 = static_cast<float>(config.adam_beta1);
  const auto b2 = static_cast<float>(config.adam_beta2);
  const auto eps = static_cast<float>(config.adam_eps);
  long step = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto lr = static_cast<float>(config.LearningRateAt(epoch));
    double epoch_sum = 0.0;
    for (const auto &batch : batches) {
      epoch_sum += ContrastiveLoss(result.params, batch, config.tau, config.variant, &grad).mean;
      ++step;
      const float c1 = 1.0f - std::pow(b1, static_cast<float>(step));
      const float c2 = 1.0f - std::pow(b2, static_cast<float>(step));
      auto grads = grad.Tensors();
      auto ms = m.MutableTensors();
      auto vs = v.MutableTensors();
      std::size_t i = 0;
      result.params.ForEach([&](const char *, Mat<float> &w) {
        Mat<float> &mi = *ms[i];
        Mat<float> &vi = *vs[i];
        const auto g = grads[i]->array();
        mi.array() = b1 * mi.array() + (1.0f - b1) * g;
        vi.array() = b2 * vi.array() + (1.0f - b2) * g.square();
        w.array() -= lr * (mi.array() / c1) / ((vi.array() / c2).sqrt() + eps);
        ++i;
      });
    }
    result.epoch_loss.push_back(epoch_sum / static_cast<double>(batches.size()));
  }
  return result;
}

}  // namespace xmrag
