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

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "xmrag/dense.h"
#include "xmrag/error.h"

namespace xmrag {

double RecallAtK(const std::vector<std::vector<std::string>> &rankings,
                 const std::vector<std::string> &truth, std::size_t k) {
  if (k < 1) throw UsageError("k must be at least 1");
  if (rankings.size() != truth.size()) {
    throw DataError("rankings and truth ids differ in length");
  }
  if (rankings.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t q = 0; q < truth.size(); ++q) {
    if (truth[q].empty()) throw DataError("query " + std::to_string(q) + " has no truth id");
    const auto &r = rankings[q];
    const auto end = r.begin() + static_cast<std::ptrdiff_t>(std::min(k, r.size()));
    if (std::find(r.begin(), end, truth[q]) != end) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double CoverageRate(const std::vector<SatisfactionVector> &vectors, std::size_t n) {
  if (n == 0) throw DataError("coverage needs at least one subquery");
  std::vector<bool> covered(n, false);
  for (const auto &s : vectors) {
    if (s.size() != n) throw DataError("satisfaction vector length does not match the query");
    for (std::size_t i = 0; i < n; ++i) {
      if (s[i]) covered[i] = true;
    }
  }
  const auto hits = std::count(covered.begin(), covered.end(), true);
  return static_cast<double>(hits) / static_cast<double>(n);
}

double CoverageRate(const ParetoResult &result, const Query &query) {
  std::vector<SatisfactionVector> vectors;
  for (const auto &e : result.entries) vectors.push_back(e.candidate.s);
  return CoverageRate(vectors, query.size());
}

std::vector<std::uint32_t> LexicalTopK(const Corpus &corpus, const Query &query,
                                       std::size_t k) {
  if (k < 1) throw UsageError("k must be at least 1");
  std::set<std::string> bag;
  for (const auto &q : query.subqueries()) {
    for (auto &t : Tokenize(q.text, corpus.match_options())) bag.insert(std::move(t));
  }
  std::vector<std::uint32_t> score(corpus.size(), 0);
  for (const auto &t : bag) {
    for (std::uint32_t i : corpus.postings(t)) ++score[i];
  }
  std::vector<std::uint32_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0u);
  const std::size_t top = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      if (score[a] != score[b]) return score[a] > score[b];
                      return corpus.record(a).id < corpus.record(b).id;
                    });
  order.resize(top);
  return order;
}

double LexicalCoverage(const Corpus &corpus, const Query &query, std::size_t k) {
  std::vector<SatisfactionVector> vectors;
  std::vector<std::vector<std::string>> phrases;
  for (const auto &q : query.subqueries()) {
    phrases.push_back(Tokenize(q.text, corpus.match_options()));
  }
  for (std::uint32_t i : LexicalTopK(corpus, query, k)) {
    vectors.push_back(Satisfaction(corpus.tokens(i), phrases));
  }
  return CoverageRate(vectors, query.size());
}

EvalReport MakeEvalReport(std::string metric, std::vector<double> per_query) {
  EvalReport r;
  r.metric = std::move(metric);
  r.per_query = std::move(per_query);
  double sum = 0.0;
  for (double v : r.per_query) sum += v;
  r.mean = r.per_query.empty() ? 0.0 : sum / static_cast<double>(r.per_query.size());
  return r;
}

nlohmann::ordered_json EvalReportJson(const EvalReport &report) {
  nlohmann::ordered_json j;
  j["metric"] = report.metric;
  j["mean"] = report.mean;
  j["per_query"] = report.per_query;
  j["config"] = report.config;
  nlohmann::ordered_json counters = nlohmann::ordered_json::object();
  for (const auto &[k, v] : report.counters) counters[k] = v;
  j["counters"] = counters;
  return j;
}

std::string EvalReportTable(const std::vector<EvalReport> &reports) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-28s %8s %10s\n", "metric", "queries", "mean");
  out << line;
  for (const auto &r : reports) {
    std::snprintf(line, sizeof(line), "%-28s %8zu %10.6f\n", r.metric.c_str(),
                  r.per_query.size(), r.mean);
    out << line;
  }
  return out.str();
}

std::vector<EvalReport> EvaluatePlanted(const PlantSpec &spec, int jobs) {
  const auto instances = PlantCorpus(spec);
  const AdapterParams params = IdentityAdapter(spec.dim);
  std::vector<std::vector<std::string>> rankings;
  std::vector<std::string> truth;
  std::vector<double> exact;
  std::uint64_t dense_forwards = 0, joint_forwards = 0;
  for (const auto &inst : instances) {
    const DenseRanking ranking = RankDense(inst.corpus, inst.query, params, 1, jobs);
    dense_forwards += ranking.forwards;
    rankings.push_back({});
    for (const auto &h : ranking.hits) rankings.back().push_back(h.id);
    truth.push_back(inst.truth_id);

    JointOptions options;
    options.jobs = jobs;
    const ParetoResult result = JointRetrieve(inst.corpus, inst.query, &params, options);
    joint_forwards += result.counters.dense_forwards;
    exact.push_back(result.entries.size() == 1 &&
                            result.entries.front().candidate.id == inst.truth_id
                        ? 1.0
                        : 0.0);
  }
  std::vector<double> recall;
  for (std::size_t q = 0; q < truth.size(); ++q) {
    recall.push_back(RecallAtK({rankings[q]}, {truth[q]}, 1));
  }
  nlohmann::ordered_json config{{"suite", "planted"},       {"num_queries", spec.num_queries},
                                {"n", spec.n},              {"records", spec.records},
                                {"dim", spec.dim},          {"seed", spec.seed}};
  EvalReport r1 = MakeEvalReport("recall_at_1", std::move(recall));
  r1.config = config;
  r1.counters["dense_forwards"] = static_cast<double>(dense_forwards);
  EvalReport r2 = MakeEvalReport("pareto_is_truth", std::move(exact));
  r2.config = config;
  r2.counters["dense_forwards"] = static_cast<double>(joint_forwards);
  return {std::move(r1), std::move(r2)};
}

RandomInstanceSpec CoverageSuiteSpec(std::uint64_t seed) {
  RandomInstanceSpec spec;
  spec.n = 4;
  spec.records = 60;
  spec.tokens = 3;
  spec.dim = 8;
  spec.phrase_rate = 0.1;
  spec.scramble_rate = 0.1;
  spec.seed = seed;
  return spec;
}

CoverageComparison CompareCoverage(const RandomInstanceSpec &base, int corpora,
                                   std::size_t k, const JointOptions &options) {
  if (corpora < 1) throw UsageError("need at least one corpus");
  std::vector<double> joint, baseline;
  std::size_t at_least = 0, greater = 0;
  for (int c = 0; c < corpora; ++c) {
    RandomInstanceSpec spec = base;
    spec.seed = base.seed + static_cast<std::uint64_t>(c);
    const RandomInstance inst = MakeRandomInstance(spec);
    const ParetoResult result = JointRetrieve(inst.corpus, inst.query, &inst.params, options);
    const double j = CoverageRate(result, inst.query);
    const double b = LexicalCoverage(inst.corpus, inst.query, k);
    joint.push_back(j);
    baseline.push_back(b);
    if (j >= b) ++at_least;
    if (j > b) ++greater;
  }
  nlohmann::ordered_json config{{"suite", "coverage"}, {"corpora", corpora},
                                {"n", base.n},         {"records", base.records},
                                {"phrase_rate", base.phrase_rate},
                                {"scramble_rate", base.scramble_rate},
                                {"baseline_k", k},     {"seed", base.seed},
                                {"coverage", "per-query mean"}};
  CoverageComparison out;
  out.joint = MakeEvalReport("coverage_joint", std::move(joint));
  out.joint.config = config;
  out.baseline = MakeEvalReport("coverage_lexical_top_k", std::move(baseline));
  out.baseline.config = config;
  out.at_least_fraction = static_cast<double>(at_least) / corpora;
  out.strictly_greater_fraction = static_cast<double>(greater) / corpora;
  return out;
}

}  // namespace xmrag
