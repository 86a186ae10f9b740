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

#include <gtest/gtest.h>

#include "xmrag/error.h"
#include "xmrag/synthetic.h"

namespace xmrag {
namespace {

PairDatasetSpec SmallData() {
  PairDatasetSpec spec;
  spec.pairs = 24;
  spec.tokens = 3;
  spec.vision_dim = 6;
  spec.text_dim = 5;
  spec.seed = 8;
  return spec;
}

const AdapterShape kShape{6, 5, 8, 2, 2, 16, 0};

TEST(TrainConfig, StepSchedule) {
  TrainConfig c;
  EXPECT_DOUBLE_EQ(c.LearningRateAt(0), 5e-5);
  EXPECT_DOUBLE_EQ(c.LearningRateAt(2), 5e-5);
  EXPECT_DOUBLE_EQ(c.LearningRateAt(3), 5e-5 * 0.6);
  EXPECT_DOUBLE_EQ(c.LearningRateAt(5), 5e-5 * 0.6);
  EXPECT_DOUBLE_EQ(c.LearningRateAt(6), 5e-5 * 0.36);
  EXPECT_DOUBLE_EQ(c.LearningRateAt(9), 5e-5 * 0.216);
}

TEST(TrainConfig, Validates) {
  TrainConfig c;
  c.tau = 0.0;
  EXPECT_THROW(c.Validate(), UsageError);
  c = TrainConfig{};
  c.decay = 1.5;
  EXPECT_THROW(c.Validate(), UsageError);
  c = TrainConfig{};
  c.batch_size = 0;
  EXPECT_THROW(c.Validate(), UsageError);
}

TEST(TrainAdapter, EmptyDatasetIsDataError) {
  EXPECT_THROW(TrainAdapter({}, kShape, TrainConfig{}), DataError);
}

TEST(TrainAdapter, ZeroLearningRateLeavesParamsAlone) {
  const auto data = MakePairDataset(SmallData());
  TrainConfig c;
  c.learning_rate = 0.0;
  c.epochs = 3;
  c.batch_size = 8;
  const AdapterParams init = InitAdapterParams<float>(kShape, 5);
  const TrainResult r = TrainAdapter(data, init, c);
  auto a = init.Tensors(), b = r.params.Tensors();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i], *b[i]);
  ASSERT_EQ(r.epoch_loss.size(), 3u);
  EXPECT_EQ(r.epoch_loss[0], r.epoch_loss[1]);
  EXPECT_EQ(r.epoch_loss[1], r.epoch_loss[2]);
}

TEST(TrainAdapter, SameSeedGivesBitwiseIdenticalTrace) {
  const auto data = MakePairDataset(SmallData());
  TrainConfig c;
  c.epochs = 4;
  c.batch_size = 6;
  c.learning_rate = 1e-3;
  c.seed = 42;
  const TrainResult a = TrainAdapter(data, kShape, c);
  const TrainResult b = TrainAdapter(data, kShape, c);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
  c.seed = 43;
  EXPECT_NE(TrainAdapter(data, kShape, c).epoch_loss, a.epoch_loss);
}

TEST(TrainAdapter, LossDecreases) {
  const auto data = MakePairDataset(SmallData());
  TrainConfig c;
  c.epochs = 10;
  c.batch_size = 6;
  c.learning_rate = 3e-3;
  const TrainResult r = TrainAdapter(data, kShape, c);
  EXPECT_LT(r.epoch_loss.back(), r.epoch_loss.front());
}

}  // namespace
}  // namespace xmrag
