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

#include "xmrag/synthetic.h"

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "xmrag/adapter_io.h"
#include "xmrag/corpus.h"
#include "xmrag/error.h"
#include "xmrag/sparse.h"

namespace xmrag {
namespace {

std::string Fingerprint(const Corpus &c) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    out += c.record(i).id + "|" + c.record(i).caption + "|";
    const auto f = c.Features(i);
    out += EncodeFeatureMatrix(f);
  }
  return out;
}

TEST(Synthetic, RandomInstanceIsDeterministic) {
  RandomInstanceSpec spec;
  spec.records = 30;
  spec.seed = 9;
  const auto a = MakeRandomInstance(spec), b = MakeRandomInstance(spec);
  EXPECT_EQ(Fingerprint(a.corpus), Fingerprint(b.corpus));
  EXPECT_EQ(a.query.texts(), b.query.texts());
  EXPECT_EQ(EncodeAdapter(a.params), EncodeAdapter(b.params));
  spec.seed = 10;
  EXPECT_NE(Fingerprint(MakeRandomInstance(spec).corpus), Fingerprint(a.corpus));
}

TEST(Synthetic, ZeroMeanUnitVector) {
  Rng rng(4);
  const auto v = ZeroMeanUnitVector(rng, 12);
  double sum = 0, norm = 0;
  for (float x : v) {
    sum += x;
    norm += static_cast<double>(x) * x;
  }
  EXPECT_NEAR(sum, 0.0, 1e-6);
  EXPECT_NEAR(norm, 1.0, 1e-6);
  EXPECT_THROW(ZeroMeanUnitVector(rng, 1), UsageError);
}

TEST(Synthetic, PlantedTruthSatisfiesAllAndDistractorsDoNot) {
  PlantSpec spec;
  spec.num_queries = 10;
  spec.records = 25;
  spec.seed = 5;
  for (const auto &inst : PlantCorpus(spec)) {
    ASSERT_EQ(inst.corpus.size(), 25u);
    int full = 0;
    for (const auto &e : ScanSatisfaction(inst.corpus, inst.query.texts())) {
      if (Popcount(e.s) == spec.n) {
        ++full;
        EXPECT_EQ(inst.corpus.record(e.index).id, inst.truth_id);
      }
    }
    EXPECT_EQ(full, 1);
  }
}

TEST(Synthetic, PairDatasetShapes) {
  PairDatasetSpec spec;
  spec.pairs = 10;
  const auto data = MakePairDataset(spec);
  ASSERT_EQ(data.size(), 10u);
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(data[i].x.rows, 8u);
    EXPECT_EQ(data[i].x.cols, 32u);
    EXPECT_EQ(data[i].t.size(), 16u);
    EXPECT_EQ(data[i].label, static_cast<int>(i));
    double n = 0;
    for (float x : data[i].t) n += static_cast<double>(x) * x;
    EXPECT_NEAR(n, 1.0, 1e-5);
  }
}

TEST(Synthetic, BenchInstanceHitRate) {
  BenchSpec spec;
  spec.records = 20000;
  spec.num_queries = 4;
  const auto inst = MakeBenchInstance(spec);
  ASSERT_EQ(inst.queries.size(), 4u);
  const auto hits = NonzeroFilter(inst.corpus, inst.queries[0].texts());
  const double rate = static_cast<double>(hits.size()) / 20000.0;
  EXPECT_NEAR(rate, spec.phrase_rate / spec.num_queries, 0.03);
}

}  // namespace
}  // namespace xmrag
