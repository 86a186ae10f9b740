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

#include <json.hpp>

#include "xmrag/corpus.h"
#include "xmrag/dense.h"
#include "xmrag/joint.h"
#include "xmrag/query.h"

namespace xmrag {

struct ReportOptions {
  //! When false, wall-clock fields are written as 0 so reports are
  //! byte-identical across runs.
  bool include_timing = true;
};

/*! {query, subqueries, beta, beta_max, grid_size, no_lexical_match,
 *   entries: [{id, s, per_subquery_sims, aggregate, F, alpha}],
 *   counters: {N, N_tilde, K, dense_forwards, sparse_micros, dense_micros}}
 *  beta_max is the loose bound.
 */
nlohmann::ordered_json RetrievalReportJson(const Query &query, const ParetoResult &result,
                                           const ReportOptions &options = {});

//! {query, subqueries, hits: [{rank, id, per_subquery_sims, aggregate}],
//!  counters: {N, dense_forwards, dense_micros}}
nlohmann::ordered_json DenseRankingJson(const Query &query, const Corpus &corpus,
                                        const DenseRanking &ranking,
                                        const ReportOptions &options = {});

//! {records, distinct_tokens, feature_files}
nlohmann::ordered_json IndexSummaryJson(const Corpus &corpus);

}  // namespace xmrag
