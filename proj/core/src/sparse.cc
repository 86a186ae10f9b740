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

#include "xmrag/sparse.h"

#include <algorithm>
#include <map>
#include <set>

#include "xmrag/error.h"

namespace xmrag {

namespace {

std::vector<std::vector<std::string>> TokenizeAll(
    const std::vector<std::string> &subqueries, const MatchOptions &options) {
  if (subqueries.empty()) throw DataError("no subqueries to match");
  std::vector<std::vector<std::string>> out;
  out.reserve(subqueries.size());
  for (const auto &q : subqueries) out.push_back(Tokenize(q, options));
  return out;
}

}  // namespace

bool ContainsPhrase(const std::vector<std::string> &tokens,
                    const std::vector<std::string> &phrase) {
  if (phrase.empty() || phrase.size() > tokens.size()) return false;
  return std::search(tokens.begin(), tokens.end(), phrase.begin(),
                     phrase.end()) != tokens.end();
}

SatisfactionVector Satisfaction(std::string_view caption,
                                const std::vector<std::string> &subqueries,
                                const MatchOptions &options) {
  return Satisfaction(Tokenize(caption, options), TokenizeAll(subqueries, options));
}

SatisfactionVector Satisfaction(
    const std::vector<std::string> &caption_tokens,
    const std::vector<std::vector<std::string>> &subquery_tokens) {
  SatisfactionVector s(subquery_tokens.size(), 0);
  for (std::size_t i = 0; i < subquery_tokens.size(); ++i) {
    s[i] = ContainsPhrase(caption_tokens, subquery_tokens[i]) ? 1 : 0;
  }
  return s;
}

bool Dominates(const SatisfactionVector &a, const SatisfactionVector &b) {
  if (a.size() != b.size()) {
    throw DataError("satisfaction vectors differ in length (" +
                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strict = true;
  }
  return strict;
}

int Popcount(const SatisfactionVector &s) {
  return static_cast<int>(std::count(s.begin(), s.end(), std::uint8_t{1}));
}

std::string ToBitString(const SatisfactionVector &s) {
  std::string out;
  out.reserve(s.size());
  for (auto b : s) out.push_back(b ? '1' : '0');
  return out;
}

std::vector<SparseEntry> NonzeroFilter(const Corpus &corpus,
                                       const std::vector<std::string> &subqueries) {
  const auto phrases = TokenizeAll(subqueries, corpus.match_options());
  const std::size_t n = phrases.size();
  std::map<std::uint32_t, SatisfactionVector> hits;

  for (std::size_t i = 0; i < n; ++i) {
    const auto &phrase = phrases[i];
    if (phrase.empty()) continue;
    // Intersect postings, rarest token first.
    std::vector<std::span<const std::uint32_t>> lists;
    for (const auto &t : phrase) lists.push_back(corpus.postings(t));
    std::sort(lists.begin(), lists.end(),
              [](auto a, auto b) { return a.size() < b.size(); });
    if (lists.front().empty()) continue;
    std::vector<std::uint32_t> candidates(lists.front().begin(), lists.front().end());
    for (std::size_t k = 1; k < lists.size() && !candidates.empty(); ++k) {
      std::vector<std::uint32_t> next;
      std::set_intersection(candidates.begin(), candidates.end(), lists[k].begin(),
                            lists[k].end(), std::back_inserter(next));
      candidates.swap(next);
    }
    for (std::uint32_t r : candidates) {
      if (phrase.size() > 1 && !ContainsPhrase(corpus.tokens(r), phrase)) continue;
      auto &s = hits[r];
      if (s.empty()) s.assign(n, 0);
      s[i] = 1;
    }
  }

  std::vector<SparseEntry> out;
  out.reserve(hits.size());
  for (auto &[index, s] : hits) out.push_back(SparseEntry{index, std::move(s)});
  return out;
}

std::vector<SparseEntry> ScanSatisfaction(const Corpus &corpus,
                                          const std::vector<std::string> &subqueries) {
  const auto phrases = TokenizeAll(subqueries, corpus.match_options());
  std::vector<SparseEntry> out;
  out.reserve(corpus.size());
  for (std::uint32_t r = 0; r < corpus.size(); ++r) {
    out.push_back(SparseEntry{r, Satisfaction(corpus.tokens(r), phrases)});
  }
  return out;
}

std::vector<SparseEntry> NondominatedFilter(const std::vector<SparseEntry> &entries) {
  if (entries.empty()) return {};
  const std::size_t n = entries.front().s.size();
  for (const auto &e : entries) {
    if (e.s.size() != n) throw DataError("satisfaction vectors differ in length");
  }
  // A dominator always has a strictly larger popcount, and dominance is
  // transitive, so visiting distinct vectors by descending popcount and
  // testing only against the maximal ones found so far is sufficient.
  std::vector<const SatisfactionVector *> distinct;
  {
    std::set<SatisfactionVector> seen;
    for (const auto &e : entries) {
      if (seen.insert(e.s).second) distinct.push_back(&e.s);
    }
  }
  std::stable_sort(distinct.begin(), distinct.end(), [](auto *a, auto *b) {
    return Popcount(*a) > Popcount(*b);
  });
  std::set<SatisfactionVector> maximal;
  std::vector<const SatisfactionVector *> kept;
  for (const auto *v : distinct) {
    const bool dominated = std::any_of(kept.begin(), kept.end(), [&](auto *k) {
      return Dominates(*k, *v);
    });
    if (!dominated) {
      kept.push_back(v);
      maximal.insert(*v);
    }
  }
  std::vector<SparseEntry> out;
  for (const auto &e : entries) {
    if (maximal.count(e.s)) out.push_back(e);
  }
  return out;
}

}  // namespace xmrag
