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

#include "xmrag/dense.h"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "xmrag/error.h"
#include "xmrag/parallel.h"

namespace xmrag {

double SubquerySimilarity(std::span<const float> v, std::span<const float> t) {
  if (v.size() != t.size()) {
    throw DataError("similarity dimension mismatch: " + std::to_string(v.size()) +
                    " vs " + std::to_string(t.size()));
  }
  double dot = 0.0, nv = 0.0, nt = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    dot += static_cast<double>(v[i]) * t[i];
    nv += static_cast<double>(v[i]) * v[i];
    nt += static_cast<double>(t[i]) * t[i];
  }
  if (std::abs(std::sqrt(nv) - 1.0) > kUnitNormTolerance ||
      std::abs(std::sqrt(nt) - 1.0) > kUnitNormTolerance) {
    throw DataError("similarity inputs must be unit norm");
  }
  return std::clamp(dot, 0.0, 1.0);
}

DenseScore MakeDenseScore(std::vector<double> per_subquery) {
  DenseScore s;
  double sum = 0.0;
  for (double x : per_subquery) sum += x;
  s.aggregate = per_subquery.empty() ? 0.0 : sum / static_cast<double>(per_subquery.size());
  s.per_subquery = std::move(per_subquery);
  return s;
}

DenseScorer::DenseScorer(const Corpus &corpus, const Query &query,
                         const AdapterParams &params)
    : corpus_(corpus),
      params_(params),
      forwards_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  if (!query.has_embeddings()) {
    throw UsageError("dense scoring needs subquery embeddings");
  }
  if (static_cast<int>(query.embedding_dim()) != params.shape.text_dim) {
    throw DataError("subquery embeddings have dimension " +
                    std::to_string(query.embedding_dim()) + " but the adapter expects " +
                    std::to_string(params.shape.text_dim));
  }
  if (params.shape.resolved_out_dim() != params.shape.text_dim) {
    throw DataError("adapter output dimension differs from the text embedding dimension");
  }
  for (const auto &q : query.subqueries()) embeddings_.emplace_back(q.embedding);
}

DenseScore DenseScorer::Score(std::size_t record) const {
  const FeatureMatrix x = corpus_.Features(record);
  const auto vs = AdapterForwardMany(params_, x, embeddings_);
  forwards_->fetch_add(embeddings_.size(), std::memory_order_relaxed);
  std::vector<double> sims(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    sims[i] = SubquerySimilarity(vs[i], embeddings_[i]);
  }
  return MakeDenseScore(std::move(sims));
}

DenseRanking RankDense(const Corpus &corpus, const Query &query,
                       const AdapterParams &params, std::size_t k, int jobs) {
  if (k < 1) throw UsageError("k must be >= 1");
  if (corpus.empty()) throw DataError("cannot rank an empty corpus");
  const auto start = std::chrono::steady_clock::now();
  DenseScorer scorer(corpus, query, params);
  std::vector<DenseScore> scores(corpus.size());
  ParallelFor(corpus.size(), jobs, [&](std::size_t i) { scores[i] = scorer.Score(i); });

  std::vector<std::uint32_t> order(corpus.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t top = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(top), order.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      if (scores[a].aggregate != scores[b].aggregate) {
                        return scores[a].aggregate > scores[b].aggregate;
                      }
                      return corpus.record(a).id < corpus.record(b).id;
                    });
  DenseRanking out;
  out.hits.reserve(top);
  for (std::size_t r = 0; r < top; ++r) {
    const std::uint32_t i = order[r];
    out.hits.push_back(RankedHit{i, corpus.record(i).id, std::move(scores[i])});
  }
  out.forwards = scorer.forwards();
  out.micros = std::chrono::duration<double, std::micro>(
                   std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace xmrag
