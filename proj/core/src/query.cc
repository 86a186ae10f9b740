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

#include "xmrag/query.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "xmrag/error.h"

namespace xmrag {

namespace internal {
std::string_view DecomposePromptAsset();
}  // namespace internal

namespace {

constexpr double kUnitTolerance = 1e-5;

std::string AsciiLower(std::string_view s) {
  std::string out(s);
  for (auto &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool StartsWithIgnoreCase(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() &&
         AsciiLower(s.substr(0, prefix.size())) == prefix;
}

// Splits `s` at every case-insensitive occurrence of `sep`.
std::vector<std::string> SplitIgnoreCase(const std::string &s,
                                         std::string_view sep) {
  std::vector<std::string> parts;
  const std::string lower = AsciiLower(s);
  std::size_t start = 0;
  for (std::size_t pos = lower.find(sep); pos != std::string::npos;
       pos = lower.find(sep, start)) {
    parts.push_back(s.substr(start, pos - start));
    start = pos + sep.size();
  }
  parts.push_back(s.substr(start));
  return parts;
}

std::vector<std::string> SplitSentences(const std::string &s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i] == '.' && std::isspace(static_cast<unsigned char>(s[i + 1]))) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(s.substr(start));
  return parts;
}

// Splits on ',' and ';', then on the standalone word "and".
std::vector<std::string> SplitClauses(const std::string &s) {
  std::vector<std::string> out;
  std::string piece;
  auto split_and = [&](const std::string &fragment) {
    std::istringstream words(fragment);
    std::string word, current;
    while (words >> word) {
      if (AsciiLower(word) == "and") {
        out.push_back(current);
        current.clear();
        continue;
      }
      if (!current.empty()) current.push_back(' ');
      current += word;
    }
    out.push_back(current);
  };
  for (char c : s) {
    if (c == ',' || c == ';') {
      split_and(piece);
      piece.clear();
    } else {
      piece.push_back(c);
    }
  }
  split_and(piece);
  return out;
}

std::string StripDrawPrefix(std::string s) {
  for (;;) {
    s = Trim(s);
    if (StartsWithIgnoreCase(s, "draw an ")) {
      s = s.substr(8);
    } else if (StartsWithIgnoreCase(s, "draw a ")) {
      s = s.substr(7);
    } else {
      return s;
    }
  }
}

std::string StripTrailingPeriods(std::string s) {
  s = Trim(s);
  while (!s.empty() && s.back() == '.') {
    s.pop_back();
    s = Trim(s);
  }
  return s;
}

// Appends `text` unless it is empty, token-less, or a normalized duplicate.
void AppendUnique(std::vector<Subquery> &out,
                  std::unordered_set<std::string> &seen,
                  const std::string &text) {
  if (text.empty()) return;
  std::string key = NormalizeForCompare(text);
  if (key.empty() || !seen.insert(std::move(key)).second) return;
  out.push_back(Subquery{text, {}});
}

}  // namespace

Query::Query(std::string raw, std::vector<Subquery> subqueries,
             const MatchOptions &options)
    : raw_(std::move(raw)), subqueries_(std::move(subqueries)) {
  if (subqueries_.empty()) throw DataError("query has no subqueries");
  std::unordered_set<std::string> seen;
  std::size_t dim = 0;
  for (const auto &q : subqueries_) {
    const std::string key = NormalizeForCompare(q.text, options);
    if (key.empty()) {
      throw DataError("subquery \"" + q.text + "\" has no tokens");
    }
    if (!seen.insert(key).second) {
      throw DataError("duplicate subquery \"" + q.text + "\"");
    }
    if (!q.has_embedding()) continue;
    if (dim == 0) dim = q.embedding.size();
    if (q.embedding.size() != dim) {
      throw DataError("subquery embeddings have inconsistent dimensions");
    }
    double norm2 = 0.0;
    for (float x : q.embedding) norm2 += static_cast<double>(x) * x;
    if (!std::isfinite(norm2) || std::abs(std::sqrt(norm2) - 1.0) > kUnitTolerance) {
      throw DataError("embedding of subquery \"" + q.text + "\" is not unit norm");
    }
  }
}

std::vector<std::string> Query::texts() const {
  std::vector<std::string> out;
  out.reserve(subqueries_.size());
  for (const auto &q : subqueries_) out.push_back(q.text);
  return out;
}

bool Query::has_embeddings() const {
  return std::all_of(subqueries_.begin(), subqueries_.end(),
                     [](const Subquery &q) { return q.has_embedding(); });
}

std::size_t Query::embedding_dim() const {
  return has_embeddings() ? subqueries_.front().embedding.size() : 0;
}

Query MakeQuery(std::string raw, const std::vector<std::string> &subqueries,
                const MatchOptions &options) {
  std::vector<Subquery> subs;
  subs.reserve(subqueries.size());
  for (const auto &s : subqueries) subs.push_back(Subquery{s, {}});
  return Query(std::move(raw), std::move(subs), options);
}

std::vector<Subquery> DecomposeRuleBased(std::string_view raw) {
  const std::string text = StripDrawPrefix(std::string(raw));
  if (text.empty()) throw DataError("cannot decompose an empty query");

  std::vector<Subquery> out;
  std::unordered_set<std::string> seen;
  for (const auto &sentence : SplitSentences(text)) {
    const auto styled = SplitIgnoreCase(sentence, " in the style of ");
    for (std::size_t k = 0; k < styled.size(); ++k) {
      const auto clauses = SplitClauses(styled[k]);
      for (std::size_t c = 0; c < clauses.size(); ++c) {
        // The style clause keeps its "style of" head as one subquery.
        const std::string text =
            (k > 0 && c == 0) ? "style of " + Trim(clauses[c]) : clauses[c];
        AppendUnique(out, seen, StripTrailingPeriods(text));
      }
    }
  }
  if (out.empty()) {
    throw DataError("decomposition of \"" + std::string(raw) +
                    "\" yielded no subqueries");
  }
  return out;
}

std::string_view DecomposePromptTemplate() {
  return internal::DecomposePromptAsset();
}

std::string RenderDecomposePrompt(std::string_view caption) {
  static constexpr std::string_view kPlaceholder = "{caption}";
  std::string prompt(DecomposePromptTemplate());
  const std::size_t pos = prompt.find(kPlaceholder);
  if (pos == std::string::npos) {
    throw DataError("decomposition prompt lacks a {caption} placeholder");
  }
  prompt.replace(pos, kPlaceholder.size(), caption);
  return prompt;
}

std::vector<std::string> ParseEntityCompletion(const std::string &completion) {
  static constexpr std::string_view kLabel = "Entity:";
  std::vector<std::string> lines;
  {
    std::istringstream in(completion);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  std::string payload;
  bool found = false;
  for (std::size_t i = lines.size(); i-- > 0;) {
    const std::string line = Trim(lines[i]);
    if (line.compare(0, kLabel.size(), kLabel) != 0) continue;
    found = true;
    payload = Trim(line.substr(kLabel.size()));
    for (std::size_t j = i + 1; payload.empty() && j < lines.size(); ++j) {
      payload = Trim(lines[j]);
    }
    break;
  }
  if (!found) {
    throw CompletionParseError("completion has no \"Entity:\" line", completion);
  }
  std::vector<std::string> entities;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = payload.find(", ", start);
    std::string e = Trim(payload.substr(start, pos == std::string::npos
                                                   ? std::string::npos
                                                   : pos - start));
    if (!e.empty()) entities.push_back(std::move(e));
    if (pos == std::string::npos) break;
    start = pos + 2;
  }
  if (entities.empty()) {
    throw CompletionParseError("completion has an empty entity list", completion);
  }
  return entities;
}

std::vector<Subquery> DecomposeWithLlm(std::string_view raw, LlmClient &client) {
  const std::string caption = Trim(raw);
  if (caption.empty()) throw DataError("cannot decompose an empty query");
  const std::string completion = client.Complete(RenderDecomposePrompt(caption));
  std::vector<Subquery> out;
  std::unordered_set<std::string> seen;
  for (const auto &e : ParseEntityCompletion(completion)) {
    AppendUnique(out, seen, e);
  }
  if (out.empty()) {
    throw CompletionParseError("completion has no usable entities", completion);
  }
  return out;
}

Query AttachEmbeddings(const Query &query, const FeatureMatrix &embeddings) {
  embeddings.Validate();
  if (embeddings.rows != query.size()) {
    throw DataError("embedding file has " + std::to_string(embeddings.rows) +
                    " rows but the query has " + std::to_string(query.size()) +
                    " subqueries");
  }
  std::vector<Subquery> subs = query.subqueries();
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const auto row = embeddings.row(i);
    double norm2 = 0.0;
    for (float x : row) norm2 += static_cast<double>(x) * x;
    if (norm2 == 0.0) {
      throw DataError("embedding row " + std::to_string(i) + " is a zero vector");
    }
    const double inv = 1.0 / std::sqrt(norm2);
    subs[i].embedding.resize(row.size());
    for (std::size_t k = 0; k < row.size(); ++k) {
      subs[i].embedding[k] = static_cast<float>(row[k] * inv);
    }
  }
  return Query(query.raw(), std::move(subs));
}

Query AttachEmbeddings(const Query &query,
                       const std::filesystem::path &embedding_file) {
  return AttachEmbeddings(query, ReadFeatureMatrix(embedding_file));
}

}  // namespace xmrag
