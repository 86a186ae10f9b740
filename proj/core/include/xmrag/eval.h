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
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "xmrag/corpus.h"
#include "xmrag/joint.h"
#include "xmrag/query.h"
#include "xmrag/sparse.h"
#include "xmrag/synthetic.h"

namespace xmrag {

/*! Fraction of queries whose truth id is among the first k ids of its
 *  ranking. Throws UsageError when k < 1 and DataError when the ranking and
 *  truth lists differ in length or a truth id is empty.
 */
double RecallAtK(const std::vector<std::vector<std::string>> &rankings,
                 const std::vector<std::string> &truth, std::size_t k);

/*! |union of satisfied subquery indices| / n over `vectors`. Empty input
 *  yields 0. Throws DataError when a vector's length is not n.
 */
double CoverageRate(const std::vector<SatisfactionVector> &vectors, std::size_t n);

double CoverageRate(const ParetoResult &result, const Query &query);

/*! Records ranked by the number of distinct query tokens (union over all
 *  subqueries) present in the caption, descending, ties by ascending id.
 *  Returns the first min(k, N) record indices. Throws UsageError when k < 1.
 */
std::vector<std::uint32_t> LexicalTopK(const Corpus &corpus, const Query &query,
                                       std::size_t k);

//! CoverageRate of the satisfaction vectors of LexicalTopK(corpus, query, k).
double LexicalCoverage(const Corpus &corpus, const Query &query, std::size_t k);

struct EvalReport {
  std::string metric;
  std::vector<double> per_query;
  //! Arithmetic mean of per_query (0 when empty).
  double mean = 0.0;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::map<std::string, double> counters;
};

//! Builds a report with mean filled in.
EvalReport MakeEvalReport(std::string metric, std::vector<double> per_query);

nlohmann::ordered_json EvalReportJson(const EvalReport &report);

//! Plain-text table: one header line, one row per report.
std::string EvalReportTable(const std::vector<EvalReport> &reports);

/*! Planted-corpus suite with IdentityAdapter(spec.dim): "recall_at_1" of
 *  RankDense against the truth ids and "pareto_is_truth" (1 when
 *  JointRetrieve returns exactly the truth record).
 */
std::vector<EvalReport> EvaluatePlanted(const PlantSpec &spec, int jobs = 1);

struct CoverageComparison {
  EvalReport joint;     //!< "coverage_joint"
  EvalReport baseline;  //!< "coverage_lexical_top_k"
  //! Fraction of corpora where joint >= baseline, and where joint > baseline.
  double at_least_fraction = 0.0;
  double strictly_greater_fraction = 0.0;
};

//! Random-corpus settings of the coverage suite: four subqueries, sparse
//! phrase hits and scrambled captions that share words with the query.
RandomInstanceSpec CoverageSuiteSpec(std::uint64_t seed = 0);

/*! Coverage of JointRetrieve against the lexical top-k baseline on
 *  `corpora` random instances; instance c uses seed base.seed + c.
 */
CoverageComparison CompareCoverage(const RandomInstanceSpec &base, int corpora,
                                   std::size_t k, const JointOptions &options);

}  // namespace xmrag
