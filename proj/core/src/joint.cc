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

#include "xmrag/joint.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <bit>
#include <limits>
#include <map>
#include <set>

#include "xmrag/error.h"
#include "xmrag/parallel.h"

namespace xmrag {

namespace {

using Clock = std::chrono::steady_clock;

double MicrosSince(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

void Compositions(int n, int remaining, std::vector<int> &prefix,
                  std::vector<std::vector<int>> &out) {
  if (static_cast<int>(prefix.size()) == n - 1) {
    prefix.push_back(remaining);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  const int slots_after = n - static_cast<int>(prefix.size()) - 1;
  for (int c = 1; c <= remaining - slots_after; ++c) {
    prefix.push_back(c);
    Compositions(n, remaining - c, prefix, out);
    prefix.pop_back();
  }
}

// Result order: more satisfied subqueries first, then denser, then id.
bool EntryBefore(const ParetoEntry &a, const ParetoEntry &b) {
  const int pa = Popcount(a.candidate.s), pb = Popcount(b.candidate.s);
  if (pa != pb) return pa > pb;
  if (a.candidate.dense.aggregate != b.candidate.dense.aggregate) {
    return a.candidate.dense.aggregate > b.candidate.dense.aggregate;
  }
  return a.candidate.id < b.candidate.id;
}

// True if a should represent a satisfaction vector instead of b.
bool BetterRepresentative(const Candidate &a, const Candidate &b) {
  if (a.dense.aggregate != b.dense.aggregate) return a.dense.aggregate > b.dense.aggregate;
  return a.id < b.id;
}

std::vector<DenseScore> ScoreRecords(const Corpus &corpus, const Query &query,
                                     const AdapterParams *params, bool dense,
                                     const std::vector<std::uint32_t> &records, int jobs,
                                     std::uint64_t &forwards) {
  std::vector<DenseScore> scores(records.size());
  if (!dense) {
    for (auto &s : scores) s = MakeDenseScore(std::vector<double>(query.size(), 0.0));
    forwards = 0;
    return scores;
  }
  if (!params) throw UsageError("dense scoring requested without adapter parameters");
  DenseScorer scorer(corpus, query, *params);
  ParallelFor(records.size(), jobs,
              [&](std::size_t i) { scores[i] = scorer.Score(records[i]); });
  forwards = scorer.forwards();
  return scores;
}

}  // namespace

std::vector<WeightVector> SimplexGrid(int n, int m, const GridOptions &options) {
  if (n < 1) throw UsageError("simplex grid needs n >= 1");
  if (m < n) {
    throw UsageError("grid resolution m = " + std::to_string(m) +
                     " is smaller than the subquery count n = " + std::to_string(n));
  }
  if (options.support_vectors && !(options.epsilon > 0.0 && options.epsilon < 1.0)) {
    throw UsageError("support-vector epsilon must be in (0, 1)");
  }
  std::vector<WeightVector> grid;
  std::set<WeightVector> seen;
  auto add = [&](WeightVector w) {
    if (seen.insert(w).second) grid.push_back(std::move(w));
  };

  std::vector<std::vector<int>> comps;
  std::vector<int> prefix;
  Compositions(n, m, prefix, comps);
  for (const auto &c : comps) {
    WeightVector w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = static_cast<double>(c[static_cast<std::size_t>(i)]) / m;
    add(std::move(w));
  }

  if (options.support_vectors && n > 1) {
    if (n > 30) throw UsageError("support vectors are limited to n <= 30");
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    for (std::uint64_t mask = 1; mask < full; ++mask) {
      const int size = std::popcount(mask);
      WeightVector w(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        w[static_cast<std::size_t>(i)] = (mask >> i) & 1
                                             ? (1.0 - options.epsilon) / size
                                             : options.epsilon / (n - size);
      }
      add(std::move(w));
    }
  }
  return grid;
}

BetaBound ComputeBetaBound(const std::vector<WeightVector> &grid,
                           const std::vector<DenseScore> &scores) {
  if (grid.empty()) throw UsageError("beta bound needs a non-empty grid");
  const double n = static_cast<double>(grid.front().size());
  BetaBound b;
  b.delta_min = std::numeric_limits<double>::infinity();
  for (const auto &w : grid) {
    for (double a : w) {
      if (a > 0.0) b.delta_min = std::min(b.delta_min, a);
    }
  }
  double c_max = 0.0;
  for (const auto &s : scores) {
    double sum = 0.0;
    for (double x : s.per_subquery) sum += x;
    c_max = std::max(c_max, sum);
  }
  b.loose = b.delta_min / n;
  if (c_max > 0.0) {
    b.c_max = c_max;
    b.tight = b.delta_min / c_max;
  } else {
    b.c_max = n;
    b.tight = b.loose;
  }
  return b;
}

double ScalarizedObjective(const Candidate &c, const WeightVector &alpha, double beta) {
  double sparse = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) sparse += alpha[i] * c.s[i];
  return sparse + beta * static_cast<double>(alpha.size()) * c.dense.aggregate;
}

std::size_t ScalarizedArgmax(const std::vector<Candidate> &candidates,
                             const WeightVector &alpha, double beta) {
  if (candidates.empty()) throw DataError("scalarized argmax over an empty candidate set");
  if (!(beta > 0.0)) throw UsageError("beta must be > 0");
  std::size_t best = 0;
  double best_f = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Candidate &c = candidates[i];
    if (c.s.size() != alpha.size()) {
      throw UsageError("weight vector and satisfaction vector differ in length");
    }
    const double f = ScalarizedObjective(c, alpha, beta);
    if (i == 0 || f > best_f ||
        (f == best_f && BetterRepresentative(c, candidates[best]))) {
      best = i;
      best_f = f;
    }
  }
  return best;
}

ParetoResult JointRetrieve(const Corpus &corpus, const Query &query,
                           const AdapterParams *params, const JointOptions &options) {
  ParetoResult result;
  result.counters.n_records = corpus.size();
  const auto grid = SimplexGrid(static_cast<int>(query.size()), options.grid_resolution,
                                options.grid);
  result.counters.grid_size = grid.size();

  auto t0 = Clock::now();
  const auto sparse = NonzeroFilter(corpus, query.texts());
  result.counters.sparse_micros = MicrosSince(t0);
  result.counters.n_tilde = sparse.size();

  std::vector<std::uint32_t> records;
  records.reserve(sparse.size());
  for (const auto &e : sparse) records.push_back(e.index);

  t0 = Clock::now();
  auto scores = ScoreRecords(corpus, query, params, options.dense, records, options.jobs,
                             result.counters.dense_forwards);
  result.counters.dense_micros = MicrosSince(t0);

  result.bound = ComputeBetaBound(grid, scores);
  result.beta = options.beta.value_or(0.9 * result.bound.loose);
  if (!(result.beta > 0.0)) throw UsageError("beta must be > 0");
  if (sparse.empty()) {
    result.no_lexical_match = true;
    return result;
  }

  std::vector<Candidate> candidates(sparse.size());
  for (std::size_t i = 0; i < sparse.size(); ++i) {
    candidates[i] = Candidate{sparse[i].index, corpus.record(sparse[i].index).id,
                              sparse[i].s, std::move(scores[i])};
  }

  // Union of per-weight winners, remembering the first weight that chose each.
  std::map<std::size_t, std::size_t> winners;  // candidate position -> grid index
  for (std::size_t g = 0; g < grid.size(); ++g) {
    winners.emplace(ScalarizedArgmax(candidates, grid[g], result.beta), g);
  }

  std::map<SatisfactionVector, ParetoEntry> by_vector;
  for (const auto &[pos, g] : winners) {
    const Candidate &c = candidates[pos];
    ParetoEntry entry{c, ScalarizedObjective(c, grid[g], result.beta), grid[g]};
    auto it = by_vector.find(c.s);
    if (it == by_vector.end()) {
      by_vector.emplace(c.s, std::move(entry));
    } else if (BetterRepresentative(c, it->second.candidate)) {
      it->second = std::move(entry);
    }
  }
  for (auto &[s, entry] : by_vector) result.entries.push_back(std::move(entry));
  std::sort(result.entries.begin(), result.entries.end(), EntryBefore);
  return result;
}

ParetoResult ParetoOracle(const Corpus &corpus, const Query &query,
                          const AdapterParams *params, int jobs) {
  ParetoResult result;
  result.counters.n_records = corpus.size();

  auto t0 = Clock::now();
  std::vector<SparseEntry> nonzero;
  for (auto &e : ScanSatisfaction(corpus, query.texts())) {
    if (Popcount(e.s) > 0) nonzero.push_back(std::move(e));
  }
  result.counters.n_tilde = nonzero.size();
  if (nonzero.empty()) {
    result.no_lexical_match = true;
    return result;
  }

  std::vector<std::uint32_t> survivors;
  for (std::size_t i = 0; i < nonzero.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < nonzero.size() && !dominated; ++j) {
      dominated = j != i && Dominates(nonzero[j].s, nonzero[i].s);
    }
    if (!dominated) survivors.push_back(static_cast<std::uint32_t>(i));
  }
  result.counters.sparse_micros = MicrosSince(t0);

  std::vector<std::uint32_t> records;
  for (auto i : survivors) records.push_back(nonzero[i].index);
  t0 = Clock::now();
  auto scores = ScoreRecords(corpus, query, params, params != nullptr, records, jobs,
                             result.counters.dense_forwards);
  result.counters.dense_micros = MicrosSince(t0);

  std::map<SatisfactionVector, ParetoEntry> by_vector;
  for (std::size_t k = 0; k < survivors.size(); ++k) {
    const SparseEntry &e = nonzero[survivors[k]];
    Candidate c{e.index, corpus.record(e.index).id, e.s, std::move(scores[k])};
    auto it = by_vector.find(e.s);
    if (it == by_vector.end()) {
      by_vector.emplace(e.s, ParetoEntry{std::move(c), 0.0, {}});
    } else if (BetterRepresentative(c, it->second.candidate)) {
      it->second = ParetoEntry{std::move(c), 0.0, {}};
    }
  }
  for (auto &[s, entry] : by_vector) result.entries.push_back(std::move(entry));
  std::sort(result.entries.begin(), result.entries.end(), EntryBefore);
  return result;
}

}  // namespace xmrag
