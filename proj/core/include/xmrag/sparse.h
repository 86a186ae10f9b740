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
#include <string>
#include <string_view>
#include <vector>

#include "xmrag/corpus.h"
#include "xmrag/text.h"

namespace xmrag {

//! Bit i is 1 iff subquery i occurs in the caption.
using SatisfactionVector = std::vector<std::uint8_t>;

struct SparseEntry {
  std::uint32_t index = 0;
  SatisfactionVector s;

  friend bool operator==(const SparseEntry &, const SparseEntry &) = default;
};

//! True iff `phrase` is non-empty and occurs as a contiguous run in `tokens`.
bool ContainsPhrase(const std::vector<std::string> &tokens,
                    const std::vector<std::string> &phrase);

//! Phrase-level match of each subquery against the caption, after both are
//! normalized with `options`. Throws DataError if `subqueries` is empty.
SatisfactionVector Satisfaction(std::string_view caption,
                                const std::vector<std::string> &subqueries,
                                const MatchOptions &options = {});

//! Same, over pre-tokenized inputs.
SatisfactionVector Satisfaction(
    const std::vector<std::string> &caption_tokens,
    const std::vector<std::vector<std::string>> &subquery_tokens);

//! a >= b everywhere and a > b somewhere. Throws DataError on length mismatch.
bool Dominates(const SatisfactionVector &a, const SatisfactionVector &b);

int Popcount(const SatisfactionVector &s);

std::string ToBitString(const SatisfactionVector &s);

/*! Records with at least one satisfied subquery, in corpus order.
 *
 *  Candidates come from intersecting the inverted-index postings of each
 *  subquery's tokens; only those are checked for contiguity. Feature files
 *  are never touched.
 */
std::vector<SparseEntry> NonzeroFilter(const Corpus &corpus,
                                       const std::vector<std::string> &subqueries);

//! Satisfaction vectors of every record by direct caption scan, in corpus
//! order (including all-zero vectors).
std::vector<SparseEntry> ScanSatisfaction(const Corpus &corpus,
                                          const std::vector<std::string> &subqueries);

/*! Entries whose vector no other entry dominates, in input order. Entries
 *  sharing a vector are all kept. Throws DataError on mixed lengths.
 */
std::vector<SparseEntry> NondominatedFilter(const std::vector<SparseEntry> &entries);

}  // namespace xmrag
