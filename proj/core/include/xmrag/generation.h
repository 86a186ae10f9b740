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

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "xmrag/corpus.h"
#include "xmrag/joint.h"
#include "xmrag/mllm_client.h"
#include "xmrag/query.h"

namespace xmrag {

//! Subquery texts whose bit is set, in query order. Throws DataError on a
//! length mismatch.
std::vector<std::string> SatisfiedSubqueries(const SatisfactionVector &s, const Query &query);

//! English ordinal: 1st, 2nd, 3rd, 4th, ..., 11th, 12th, 13th, 21st, ...
std::string Ordinal(std::size_t r);

struct PromptClause {
  std::string record_id;
  std::string image_ref;
  std::size_t ordinal = 0;  //!< 1-based
  std::vector<std::string> satisfied;
};

struct GenerationPrompt {
  std::string query_text;
  std::vector<PromptClause> clauses;
  std::string rendered;
};

/*! Renders the raw query followed by one line per entry that satisfies at
 *  least one subquery:
 *
 *    <image_R> Use only [q_a, q_b] in [the Rth retrieved image].
 *
 *  Lines are joined with '\n'. Image references come from `corpus` when
 *  given, otherwise they are the record ids. Throws DataError when no entry
 *  survives.
 */
GenerationPrompt BuildPrompt(const Query &query, const ParetoResult &result,
                             const Corpus *corpus = nullptr);

struct Provenance {
  std::string prompt;
  std::vector<std::string> image_ids;
  std::string model;
  std::string response_id;
  std::string timestamp;  //!< ISO-8601 UTC
};

std::string ProvenanceJson(const Provenance &p);

struct GenerateOptions {
  //! No client call at all; the outcome carries only the provenance.
  bool offline = false;
  std::string model = kDefaultMllmModel;
  std::size_t max_reference_images = 16;
  std::function<std::chrono::system_clock::time_point()> clock =
      [] { return std::chrono::system_clock::now(); };
};

struct GenerationOutcome {
  std::optional<std::string> image_bytes;
  Provenance provenance;
};

std::string FormatTimestamp(std::chrono::system_clock::time_point t);

/*! Submits the prompt and its reference images. Throws UsageError when the
 *  clause count exceeds max_reference_images or the client is null while
 *  online, and DataError when a reference image file is unreadable.
 */
GenerationOutcome GenerateImage(const GenerationPrompt &prompt, MllmClient *client,
                                const GenerateOptions &options = {});

}  // namespace xmrag
