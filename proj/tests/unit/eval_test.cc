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

#include "xmrag/eval.h"

#include <gtest/gtest.h>

#include "xmrag/error.h"

namespace xmrag {
namespace {

Corpus TextCorpus(const std::vector<std::pair<std::string, std::string>> &rows) {
  std::vector<ImageRecord> records;
  for (const auto &[id, caption] : rows) records.push_back(ImageRecord{id, caption, "", {}});
  return Corpus(std::move(records), nullptr);
}

TEST(RecallAtK, HandExamples) {
  const std::vector<std::vector<std::string>> rankings{{"a", "b"}, {"c", "d"}, {}};
  const std::vector<std::string> truth{"a", "d", "e"};
  EXPECT_DOUBLE_EQ(RecallAtK(rankings, truth, 1), 1.0 / 3);
  EXPECT_DOUBLE_EQ(RecallAtK(rankings, truth, 2), 2.0 / 3);
  EXPECT_DOUBLE_EQ(RecallAtK({}, {}, 1), 0.0);
  EXPECT_THROW(RecallAtK(rankings, truth, 0), UsageError);
  EXPECT_THROW(RecallAtK(rankings, {"a"}, 1), DataError);
  EXPECT_THROW(RecallAtK({{"a"}}, {""}, 1), DataError);
}

TEST(CoverageRate, HandExamples) {
  EXPECT_DOUBLE_EQ(CoverageRate({{1, 0, 0}, {0, 1, 0}, {1, 1, 0}}, 3), 2.0 / 3);
  EXPECT_DOUBLE_EQ(CoverageRate({}, 3), 0.0);
  EXPECT_DOUBLE_EQ(CoverageRate({{1, 1}}, 2), 1.0);
  EXPECT_THROW(CoverageRate({{1, 0}}, 3), DataError);
  EXPECT_THROW(CoverageRate({{1}}, 0), DataError);
}

TEST(LexicalTopK, CountsDistinctQueryTokens) {
  const Corpus c = TextCorpus({{"d", "red car blue sky"},
                               {"a", "red sky"},
                               {"b", "blue car red car"},
                               {"c", "nothing here"}});
  const Query q = MakeQuery("q", {"red car", "blue sky"});
  // Distinct tokens {red, car, blue, sky}: d has 4, b has 3, a has 2, c has 0.
  EXPECT_EQ(LexicalTopK(c, q, 3), (std::vector<std::uint32_t>{0, 2, 1}));
  EXPECT_EQ(LexicalTopK(c, q, 10).size(), 4u);
  EXPECT_THROW(LexicalTopK(c, q, 0), UsageError);
  // d satisfies both phrases, so any k covers everything.
  EXPECT_DOUBLE_EQ(LexicalCoverage(c, q, 1), 1.0);
  // Ties in score break by id: "a" before "b" for a query over {red}.
  const Corpus tie = TextCorpus({{"b", "red"}, {"a", "red"}});
  EXPECT_EQ(LexicalTopK(tie, MakeQuery("q", {"red"}), 2), (std::vector<std::uint32_t>{1, 0}));
}

TEST(LexicalCoverage, ScrambledWordsCoverNothing) {
  const Corpus c = TextCorpus({{"a", "car red sky blue"}, {"b", "red car"}});
  const Query q = MakeQuery("q", {"red car", "blue sky"});
  EXPECT_DOUBLE_EQ(LexicalCoverage(c, q, 1), 0.0);
  EXPECT_DOUBLE_EQ(LexicalCoverage(c, q, 2), 0.5);
}

TEST(EvalReport, MeanAndJson) {
  const EvalReport r = MakeEvalReport("m", {1.0, 0.0, 0.5});
  EXPECT_DOUBLE_EQ(r.mean, 0.5);
  EXPECT_EQ(MakeEvalReport("e", {}).mean, 0.0);
  const auto j = EvalReportJson(r);
  EXPECT_EQ(j["metric"], "m");
  EXPECT_EQ(j["per_query"].size(), 3u);
  EXPECT_NE(EvalReportTable({r}).find("m"), std::string::npos);
}

TEST(EvaluatePlanted, PerfectOnSmallSuite) {
  PlantSpec spec;
  spec.num_queries = 8;
  spec.records = 20;
  const auto reports = EvaluatePlanted(spec);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].metric, "recall_at_1");
  EXPECT_DOUBLE_EQ(reports[0].mean, 1.0);
  EXPECT_EQ(reports[1].metric, "pareto_is_truth");
  EXPECT_DOUBLE_EQ(reports[1].mean, 1.0);
  EXPECT_EQ(EvalReportJson(EvaluatePlanted(spec)[0]).dump(), EvalReportJson(reports[0]).dump());
}

TEST(CompareCoverage, DeterministicAndConsistent) {
  const auto a = CompareCoverage(CoverageSuiteSpec(3), 5, 5, JointOptions{});
  const auto b = CompareCoverage(CoverageSuiteSpec(3), 5, 5, JointOptions{});
  EXPECT_EQ(a.joint.per_query, b.joint.per_query);
  EXPECT_EQ(a.baseline.per_query, b.baseline.per_query);
  ASSERT_EQ(a.joint.per_query.size(), 5u);
  int at_least = 0;
  for (std::size_t i = 0; i < 5; ++i) at_least += a.joint.per_query[i] >= a.baseline.per_query[i];
  EXPECT_DOUBLE_EQ(a.at_least_fraction, at_least / 5.0);
  EXPECT_GE(a.at_least_fraction, a.strictly_greater_fraction);
}

}  // namespace
}  // namespace xmrag
