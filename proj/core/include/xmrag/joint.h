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
#include <optional>
#include <string>
#include <vector>

#include "xmrag/adapter.h"
#include "xmrag/corpus.h"
#include "xmrag/dense.h"
#include "xmrag/query.h"
#include "xmrag/sparse.h"

namespace xmrag {

//! A point on the probability simplex: positive entries summing to 1.
using WeightVector = std::vector<double>;

struct GridOptions {
  //! Add, for every proper non-empty subset T of subqueries, the vector
  //! putting (1 - epsilon) / |T| on T and epsilon / (n - |T|) elsewhere.
  bool support_vectors = true;
  double epsilon = 1e-3;
};

/*! All alpha with alpha_i = c_i / m, integers c_i >= 1 summing to m, in
 *  lexicographic order of c, followed by the support vectors (subsets in
 *  increasing bitmask order). Duplicates removed. n = 1 yields {(1)}.
 *  Throws UsageError when n < 1 or m < n.
 */
std::vector<WeightVector> SimplexGrid(int n, int m, const GridOptions &options = {});

struct BetaBound {
  double delta_min = 0.0;  //!< smallest positive weight in the grid
  double c_max = 0.0;      //!< max over D~ of the summed similarities, or n
  double tight = 0.0;      //!< delta_min / c_max
  double loose = 0.0;      //!< delta_min / n
};

/*! beta_max for scalarization. With `scores` empty (or all zero sums) the
 *  tight bound falls back to the loose one. Throws UsageError on an empty
 *  grid.
 */
BetaBound ComputeBetaBound(const std::vector<WeightVector> &grid,
                           const std::vector<DenseScore> &scores = {});

struct Candidate {
  std::uint32_t index = 0;
  std::string id;
  SatisfactionVector s;
  DenseScore dense;
};

//! F = sum_i alpha_i s_i + beta * n * aggregate.
double ScalarizedObjective(const Candidate &c, const WeightVector &alpha, double beta);

/*! Position in `candidates` maximizing F; ties go to the higher dense
 *  aggregate, then the smaller id. Throws DataError on an empty list and
 *  UsageError on beta <= 0 or a weight/vector length mismatch.
 */
std::size_t ScalarizedArgmax(const std::vector<Candidate> &candidates,
                             const WeightVector &alpha, double beta);

struct ParetoEntry {
  Candidate candidate;
  double f = 0.0;
  //! Grid weight that first selected this entry (empty for the oracle).
  WeightVector alpha;
};

struct RetrievalCounters {
  std::uint64_t n_records = 0;   //!< N scanned
  std::uint64_t n_tilde = 0;     //!< |D~|
  std::uint64_t grid_size = 0;   //!< K
  std::uint64_t dense_forwards = 0;
  double sparse_micros = 0.0;
  double dense_micros = 0.0;
};

struct ParetoResult {
  std::vector<ParetoEntry> entries;
  double beta = 0.0;
  BetaBound bound;
  RetrievalCounters counters;
  //! Set when no caption matched any subquery (D~ is empty).
  bool no_lexical_match = false;
};

struct JointOptions {
  //! Dense-term weight; unset means 0.9 times the loose bound.
  std::optional<double> beta;
  int grid_resolution = 10;
  GridOptions grid;
  //! When false no adapter runs and all dense scores are zero.
  bool dense = true;
  int jobs = 1;
};

/*! Multi-objective retrieval.
 *
 *  Sparse pass over the inverted index yields D~; dense scores are computed
 *  once per D~ member; for every grid weight the scalarized argmax over D~
 *  is taken; the union is collapsed so each satisfaction vector keeps its
 *  best dense record. Entries are ordered by satisfied count (descending),
 *  aggregate (descending), id. `params` may be null only when dense is off.
 */
ParetoResult JointRetrieve(const Corpus &corpus, const Query &query,
                           const AdapterParams *params, const JointOptions &options = {});

/*! Reference result straight from the dominance definition: full caption
 *  scan, pairwise dominance over all non-zero records, and the dense argmax
 *  for each surviving distinct vector. Same ordering as JointRetrieve.
 */
ParetoResult ParetoOracle(const Corpus &corpus, const Query &query,
                          const AdapterParams *params, int jobs = 1);

}  // namespace xmrag
