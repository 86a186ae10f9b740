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

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "xmrag/adapter.h"
#include "xmrag/corpus.h"
#include "xmrag/query.h"

namespace xmrag {

inline constexpr double kUnitNormTolerance = 1e-4;

/*! Cosine of two unit vectors clamped to [0, 1]. Throws DataError when the
 *  lengths differ or either norm is off by more than kUnitNormTolerance.
 */
double SubquerySimilarity(std::span<const float> v, std::span<const float> t);

struct DenseScore {
  std::vector<double> per_subquery;
  //! Left-to-right sum of per_subquery divided by its length.
  double aggregate = 0.0;

  friend bool operator==(const DenseScore &, const DenseScore &) = default;
};

DenseScore MakeDenseScore(std::vector<double> per_subquery);

/*! Scores records of one corpus against one query with one adapter. Each
 *  Score() call loads the record's features once and runs the adapter for
 *  every subquery, adding n to the forward counter. Thread-safe.
 */
class DenseScorer {
 public:
  //! Throws UsageError if the query lacks embeddings, DataError if the
  //! embedding or adapter dimensions disagree.
  DenseScorer(const Corpus &corpus, const Query &query, const AdapterParams &params);

  DenseScore Score(std::size_t record) const;

  std::uint64_t forwards() const { return forwards_->load(); }

 private:
  const Corpus &corpus_;
  const AdapterParams &params_;
  std::vector<std::span<const float>> embeddings_;
  std::shared_ptr<std::atomic<std::uint64_t>> forwards_;
};

struct RankedHit {
  std::uint32_t index = 0;
  std::string id;
  DenseScore score;
};

struct DenseRanking {
  std::vector<RankedHit> hits;
  std::uint64_t forwards = 0;
  double micros = 0.0;
};

/*! Scores every record and returns the top min(k, N) by aggregate,
 *  descending, ties by ascending id. Throws DataError on an empty corpus and
 *  UsageError when k < 1.
 */
DenseRanking RankDense(const Corpus &corpus, const Query &query,
                       const AdapterParams &params, std::size_t k, int jobs = 1);

}  // namespace xmrag
