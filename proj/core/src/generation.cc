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

#include "xmrag/generation.h"

#include <ctime>
#include <fstream>

#include <json.hpp>

#include "xmrag/error.h"

namespace xmrag {

std::vector<std::string> SatisfiedSubqueries(const SatisfactionVector &s, const Query &query) {
  if (s.size() != query.size()) {
    throw DataError("satisfaction vector has length " + std::to_string(s.size()) +
                    " but the query has " + std::to_string(query.size()) + " subqueries");
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i]) out.push_back(query.subquery(i).text);
  }
  return out;
}

std::string Ordinal(std::size_t r) {
  const char *suffix = "th";
  const std::size_t mod100 = r % 100;
  if (mod100 < 11 || mod100 > 13) {
    switch (r % 10) {
      case 1: suffix = "st"; break;
      case 2: suffix = "nd"; break;
      case 3: suffix = "rd"; break;
      default: break;
    }
  }
  return std::to_string(r) + suffix;
}

GenerationPrompt BuildPrompt(const Query &query, const ParetoResult &result,
                             const Corpus *corpus) {
  GenerationPrompt prompt;
  prompt.query_text = query.raw();
  prompt.rendered = query.raw();
  for (const auto &entry : result.entries) {
    auto satisfied = SatisfiedSubqueries(entry.candidate.s, query);
    if (satisfied.empty()) continue;
    PromptClause clause;
    clause.record_id = entry.candidate.id;
    clause.image_ref = corpus ? corpus->ResolvedImageRef(entry.candidate.index)
                              : entry.candidate.id;
    clause.ordinal = prompt.clauses.size() + 1;
    clause.satisfied = std::move(satisfied);

    std::string joined;
    for (const auto &q : clause.satisfied) {
      if (!joined.empty()) joined += ", ";
      joined += q;
    }
    prompt.rendered += "\n<image_" + std::to_string(clause.ordinal) + "> Use only [" +
                       joined + "] in [the " + Ordinal(clause.ordinal) +
                       " retrieved image].";
    prompt.clauses.push_back(std::move(clause));
  }
  if (prompt.clauses.empty()) {
    throw DataError("no retrieved image satisfies any subquery; prompt would be empty");
  }
  return prompt;
}

std::string FormatTimestamp(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string ProvenanceJson(const Provenance &p) {
  nlohmann::ordered_json j;
  j["prompt"] = p.prompt;
  j["image_ids"] = p.image_ids;
  j["model"] = p.model;
  j["response_id"] = p.response_id;
  j["timestamp"] = p.timestamp;
  return j.dump(2);
}

GenerationOutcome GenerateImage(const GenerationPrompt &prompt, MllmClient *client,
                                const GenerateOptions &options) {
  GenerationOutcome outcome;
  outcome.provenance.prompt = prompt.rendered;
  outcome.provenance.model = options.model;
  for (const auto &c : prompt.clauses) outcome.provenance.image_ids.push_back(c.record_id);
  outcome.provenance.timestamp = FormatTimestamp(options.clock());
  if (options.offline) return outcome;

  if (!client) throw UsageError("online generation needs an image-generation client");
  if (prompt.clauses.size() > options.max_reference_images) {
    throw UsageError(std::to_string(prompt.clauses.size()) +
                     " reference images exceed the configured limit of " +
                     std::to_string(options.max_reference_images));
  }
  GenerationRequest request;
  request.prompt = prompt.rendered;
  for (const auto &c : prompt.clauses) {
    std::ifstream probe(c.image_ref, std::ios::binary);
    if (!probe) {
      throw DataError("reference image for \"" + c.record_id + "\" is unreadable: " +
                      c.image_ref);
    }
    request.images.push_back(ReferenceImage{c.record_id, c.image_ref});
  }
  GenerationResponse response = client->Generate(request);
  outcome.provenance.response_id = response.response_id;
  outcome.image_bytes = std::move(response.image_bytes);
  return outcome;
}

}  // namespace xmrag
