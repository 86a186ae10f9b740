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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "xmrag/feature_io.h"
#include "xmrag/llm_client.h"
#include "xmrag/text.h"

namespace xmrag {

struct Subquery {
  std::string text;
  //! Unit-norm text embedding; empty when not attached.
  std::vector<float> embedding;

  bool has_embedding() const { return !embedding.empty(); }
};

/*! A user query and its ordered subqueries.
 *
 *  Construction validates: at least one subquery, every subquery has at
 *  least one token, no two subqueries normalize to the same token sequence,
 *  and attached embeddings share one dimension and have unit norm (1e-5).
 */
class Query {
 public:
  Query(std::string raw, std::vector<Subquery> subqueries,
        const MatchOptions &options = {});

  const std::string &raw() const { return raw_; }
  const std::vector<Subquery> &subqueries() const { return subqueries_; }
  const Subquery &subquery(std::size_t i) const { return subqueries_.at(i); }
  std::size_t size() const { return subqueries_.size(); }

  std::vector<std::string> texts() const;

  //! True when every subquery carries an embedding.
  bool has_embeddings() const;

  //! Embedding dimension, or 0 without embeddings.
  std::size_t embedding_dim() const;

 private:
  std::string raw_;
  std::vector<Subquery> subqueries_;
};

//! Builds a Query from plain subquery strings (no embeddings).
Query MakeQuery(std::string raw, const std::vector<std::string> &subqueries,
                const MatchOptions &options = {});

/*! Deterministic splitter.
 *
 *  Leading "Draw a"/"Draw an" is removed, sentences split at ". ", the
 *  clause " in the style of X" becomes its own subquery "style of X", and
 *  fragments split further on commas, semicolons and the standalone word
 *  "and". Fragments are trimmed, trailing periods dropped, and empty or
 *  duplicate fragments removed, keeping first occurrences in order.
 *  Throws DataError on blank input or when nothing survives.
 */
std::vector<Subquery> DecomposeRuleBased(std::string_view raw);

//! The decomposition prompt with `caption` substituted for "{caption}".
std::string RenderDecomposePrompt(std::string_view caption);

//! The prompt template bytes exactly as shipped.
std::string_view DecomposePromptTemplate();

/*! Extracts entities from the last line starting with "Entity:" (or the
 *  first non-empty line following a bare "Entity:" line), split on ", ".
 *  Throws CompletionParseError carrying the raw completion.
 */
std::vector<std::string> ParseEntityCompletion(const std::string &completion);

//! Sends the rendered prompt to `client` and parses the answer. Duplicate
//! entities (after normalization) are dropped.
std::vector<Subquery> DecomposeWithLlm(std::string_view raw, LlmClient &client);

/*! Copies `query`, attaching row i of `embeddings` to subquery i after L2
 *  renormalization. Throws DataError on row-count mismatch or zero rows.
 */
Query AttachEmbeddings(const Query &query, const FeatureMatrix &embeddings);
Query AttachEmbeddings(const Query &query,
                       const std::filesystem::path &embedding_file);

}  // namespace xmrag
