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
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "xmrag/feature_io.h"
#include "xmrag/text.h"

namespace xmrag {

struct ImageRecord {
  std::string id;
  std::string caption;
  std::string feature_ref;
  std::map<std::string, std::string> meta;

  //! Path or id handed to the image generator: meta["image_path"] when
  //! present, otherwise the id.
  std::string ImageRef() const;
};

//! Supplies the vision feature matrix of record `index` on demand.
class FeatureSource {
 public:
  virtual ~FeatureSource() = default;
  virtual FeatureMatrix Load(std::size_t index) const = 0;
};

//! Reads XMRG files lazily; paths are resolved against `base_dir`.
class FileFeatureSource : public FeatureSource {
 public:
  FileFeatureSource(std::filesystem::path base_dir,
                    std::vector<std::string> refs)
      : base_dir_(std::move(base_dir)), refs_(std::move(refs)) {}

  FeatureMatrix Load(std::size_t index) const override;

  std::filesystem::path Resolve(std::size_t index) const {
    return base_dir_ / refs_.at(index);
  }

 private:
  std::filesystem::path base_dir_;
  std::vector<std::string> refs_;
};

class InMemoryFeatureSource : public FeatureSource {
 public:
  explicit InMemoryFeatureSource(std::vector<FeatureMatrix> matrices)
      : matrices_(std::move(matrices)) {}

  FeatureMatrix Load(std::size_t index) const override {
    return matrices_.at(index);
  }

 private:
  std::vector<FeatureMatrix> matrices_;
};

/*! Immutable image database with an inverted index over normalized caption
 *  tokens. Safe for concurrent reads.
 */
class Corpus {
 public:
  using Postings = std::vector<std::uint32_t>;

  Corpus() : Corpus({}, nullptr) {}
  Corpus(std::vector<ImageRecord> records,
         std::shared_ptr<const FeatureSource> features,
         MatchOptions options = {}, std::filesystem::path base_dir = {});

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  const std::vector<ImageRecord> &records() const { return records_; }
  const ImageRecord &record(std::size_t i) const { return records_.at(i); }

  //! Normalized caption tokens of record i.
  const std::vector<std::string> &tokens(std::size_t i) const {
    return tokens_.at(i);
  }

  //! Sorted record indices whose caption contains `token`; empty if none.
  std::span<const std::uint32_t> postings(const std::string &token) const;

  const std::unordered_map<std::string, Postings> &token_index() const {
    return token_index_;
  }

  std::size_t distinct_tokens() const { return token_index_.size(); }

  const MatchOptions &match_options() const { return options_; }

  //! Directory relative paths in the manifest are resolved against.
  const std::filesystem::path &base_dir() const { return base_dir_; }

  //! ImageRef() of record i, resolved against base_dir() when it names a
  //! relative path.
  std::string ResolvedImageRef(std::size_t i) const;

  //! Loads record i's vision features and bumps the load counter.
  FeatureMatrix Features(std::size_t i) const;

  //! Number of Features() calls since construction.
  std::uint64_t feature_loads() const { return feature_loads_->load(); }

 private:
  std::vector<ImageRecord> records_;
  std::vector<std::vector<std::string>> tokens_;
  std::unordered_map<std::string, Postings> token_index_;
  std::shared_ptr<const FeatureSource> features_;
  MatchOptions options_;
  std::filesystem::path base_dir_;
  std::shared_ptr<std::atomic<std::uint64_t>> feature_loads_;
};

/*! Loads a JSON Lines manifest. Each non-blank line is
 *  {"id": str, "caption": str, "feature_ref": str, "meta": {str: str}}
 *  with `meta` optional. feature_ref is resolved relative to the manifest's
 *  directory and stat-checked; payloads are not read.
 */
Corpus LoadCorpus(const std::filesystem::path &manifest_path,
                  const MatchOptions &options = {});

/*! Writes `corpus` as dir/manifest.jsonl plus one XMRG file per record under
 *  dir/features/. Returns the manifest path.
 */
std::filesystem::path SaveCorpus(const Corpus &corpus,
                                 const std::filesystem::path &dir);

}  // namespace xmrag
