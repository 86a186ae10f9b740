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

#include "xmrag/corpus.h"

#include <cstdio>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "xmrag/error.h"

namespace xmrag {

namespace fs = std::filesystem;

std::string ImageRecord::ImageRef() const {
  auto it = meta.find("image_path");
  return it != meta.end() ? it->second : id;
}

FeatureMatrix FileFeatureSource::Load(std::size_t index) const {
  return ReadFeatureMatrix(Resolve(index));
}

Corpus::Corpus(std::vector<ImageRecord> records,
               std::shared_ptr<const FeatureSource> features,
               MatchOptions options, fs::path base_dir)
    : records_(std::move(records)),
      features_(std::move(features)),
      options_(options),
      base_dir_(std::move(base_dir)),
      feature_loads_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  std::unordered_set<std::string> seen;
  tokens_.reserve(records_.size());
  for (std::uint32_t i = 0; i < records_.size(); ++i) {
    const ImageRecord &r = records_[i];
    if (r.id.empty()) throw DataError("record " + std::to_string(i) + " has an empty id");
    if (!seen.insert(r.id).second) throw DataError("duplicate id \"" + r.id + "\"");
    tokens_.push_back(Tokenize(r.caption, options_));
    for (const auto &t : tokens_.back()) {
      Postings &p = token_index_[t];
      if (p.empty() || p.back() != i) p.push_back(i);
    }
  }
}

std::span<const std::uint32_t> Corpus::postings(const std::string &token) const {
  auto it = token_index_.find(token);
  if (it == token_index_.end()) return {};
  return it->second;
}

std::string Corpus::ResolvedImageRef(std::size_t i) const {
  const ImageRecord &r = record(i);
  if (!r.meta.count("image_path")) return r.id;
  const fs::path p = r.ImageRef();
  return (p.is_relative() && !base_dir_.empty() ? base_dir_ / p : p).string();
}

FeatureMatrix Corpus::Features(std::size_t i) const {
  if (!features_) throw DataError("corpus has no feature source");
  if (i >= records_.size()) throw DataError("record index out of range");
  feature_loads_->fetch_add(1, std::memory_order_relaxed);
  return features_->Load(i);
}

Corpus LoadCorpus(const fs::path &manifest_path, const MatchOptions &options) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot open manifest " + manifest_path.string());
  const fs::path base = manifest_path.parent_path();

  std::vector<ImageRecord> records;
  std::vector<std::string> refs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where =
        manifest_path.string() + ":" + std::to_string(line_no);
    ImageRecord r;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw DataError("expected a JSON object");
      r.id = j.at("id").get<std::string>();
      r.caption = j.at("caption").get<std::string>();
      r.feature_ref = j.at("feature_ref").get<std::string>();
      if (auto m = j.find("meta"); m != j.end() && !m->is_null()) {
        r.meta = m->get<std::map<std::string, std::string>>();
      }
    } catch (const nlohmann::json::exception &e) {
      throw DataError("malformed manifest line " + std::to_string(line_no) +
                      " (" + where + "): " + e.what());
    } catch (const DataError &e) {
      throw DataError("malformed manifest line " + std::to_string(line_no) +
                      " (" + where + "): " + e.what());
    }
    if (r.id.empty()) {
      throw DataError("malformed manifest line " + std::to_string(line_no) +
                      " (" + where + "): empty id");
    }
    if (!seen.insert(r.id).second) {
      throw DataError("duplicate id \"" + r.id + "\" at line " +
                      std::to_string(line_no));
    }
    std::error_code ec;
    const fs::path feature_path = base / r.feature_ref;
    if (!fs::is_regular_file(feature_path, ec)) {
      throw DataError("missing feature file for \"" + r.id + "\": " +
                      feature_path.string());
    }
    refs.push_back(r.feature_ref);
    records.push_back(std::move(r));
  }
  auto source = std::make_shared<FileFeatureSource>(base, std::move(refs));
  return Corpus(std::move(records), std::move(source), options, base);
}

fs::path SaveCorpus(const Corpus &corpus, const fs::path &dir) {
  fs::create_directories(dir / "features");
  const fs::path manifest = dir / "manifest.jsonl";
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw DataError("cannot write " + manifest.string());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const ImageRecord &r = corpus.record(i);
    char name[32];
    std::snprintf(name, sizeof(name), "%06zu.xmrg", i);
    const std::string ref = std::string("features/") + name;
    WriteFeatureMatrix(dir / ref, corpus.Features(i));
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["caption"] = r.caption;
    j["feature_ref"] = ref;
    j["meta"] = nlohmann::ordered_json::object();
    for (const auto &[k, v] : r.meta) j["meta"][k] = v;
    out << j.dump() << '\n';
  }
  out.close();
  if (!out) throw DataError("write failure on " + manifest.string());
  return manifest;
}

}  // namespace xmrag
