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

#include "xmrag/report.h"

namespace xmrag {

namespace {

nlohmann::ordered_json QueryHeader(const Query &query) {
  nlohmann::ordered_json j;
  j["query"] = query.raw();
  j["subqueries"] = query.texts();
  return j;
}

}  // namespace

nlohmann::ordered_json RetrievalReportJson(const Query &query, const ParetoResult &result,
                                           const ReportOptions &options) {
  nlohmann::ordered_json j = QueryHeader(query);
  j["beta"] = result.beta;
  j["beta_max"] = result.bound.loose;
  j["grid_size"] = result.counters.grid_size;
  j["no_lexical_match"] = result.no_lexical_match;
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const auto &e : result.entries) {
    nlohmann::ordered_json entry;
    entry["id"] = e.candidate.id;
    std::vector<int> s(e.candidate.s.begin(), e.candidate.s.end());
    entry["s"] = s;
    entry["per_subquery_sims"] = e.candidate.dense.per_subquery;
    entry["aggregate"] = e.candidate.dense.aggregate;
    entry["F"] = e.f;
    entry["alpha"] = e.alpha;
    entries.push_back(std::move(entry));
  }
  j["entries"] = std::move(entries);
  const auto &c = result.counters;
  j["counters"] = {{"N", c.n_records},
                   {"N_tilde", c.n_tilde},
                   {"K", c.grid_size},
                   {"dense_forwards", c.dense_forwards},
                   {"sparse_micros", options.include_timing ? c.sparse_micros : 0.0},
                   {"dense_micros", options.include_timing ? c.dense_micros : 0.0}};
  return j;
}

nlohmann::ordered_json DenseRankingJson(const Query &query, const Corpus &corpus,
                                        const DenseRanking &ranking,
                                        const ReportOptions &options) {
  nlohmann::ordered_json j = QueryHeader(query);
  nlohmann::ordered_json hits = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < ranking.hits.size(); ++r) {
    const auto &h = ranking.hits[r];
    hits.push_back({{"rank", r + 1},
                    {"id", h.id},
                    {"per_subquery_sims", h.score.per_subquery},
                    {"aggregate", h.score.aggregate}});
  }
  j["hits"] = std::move(hits);
  j["counters"] = {{"N", corpus.size()},
                   {"dense_forwards", ranking.forwards},
                   {"dense_micros", options.include_timing ? ranking.micros : 0.0}};
  return j;
}

nlohmann::ordered_json IndexSummaryJson(const Corpus &corpus) {
  return {{"records", corpus.size()},
          {"distinct_tokens", corpus.distinct_tokens()},
          {"feature_files", corpus.size()}};
}

}  // namespace xmrag
