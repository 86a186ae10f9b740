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

// Writes the street-scene fixture used by CLI and golden tests:
//   manifest.jsonl, features/*.xmrg, images/*.png, adapter.xmra,
//   embeddings.xmrg, llm_replay.json, generated.png

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <json.hpp>

#include "xmrag/adapter_io.h"
#include "xmrag/corpus.h"
#include "xmrag/feature_io.h"
#include "xmrag/query.h"
#include "xmrag/random.h"
#include "xmrag/synthetic.h"

namespace fs = std::filesystem;
using namespace xmrag;

namespace {

constexpr int kDim = 4;

void WriteBytes(const fs::path &path, const std::string &bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

int main(int argc, char **argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures OUT_DIR\n";
    return 1;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir / "images");
  Rng rng(20260101);

  const std::vector<std::pair<std::string, std::string>> captions = {
      {"street1", "Cars driving on a wet road at dusk"},
      {"street2", "A white van parked on the road"},
      {"street3", "A traffic light over an empty intersection"},
      {"street4", "Two cars waiting at the intersection"},
      {"street5", "Cars on the road below a bridge"},
      {"beach1", "An empty beach at sunset"},
  };
  std::vector<ImageRecord> records;
  std::vector<FeatureMatrix> features;
  for (const auto &[id, caption] : captions) {
    ImageRecord r;
    r.id = id;
    r.caption = caption;
    r.meta["image_path"] = "images/" + id + ".png";
    records.push_back(std::move(r));
    FeatureMatrix f(3, kDim);
    for (auto &v : f.values) v = static_cast<float>(rng.Normal());
    features.push_back(std::move(f));
    WriteBytes(dir / "images" / (id + ".png"), "\x89PNG\r\n\x1a\nfixture " + id + "\n");
  }
  const Corpus corpus(std::move(records),
                      std::make_shared<InMemoryFeatureSource>(std::move(features)));
  SaveCorpus(corpus, dir);

  SaveAdapter(dir / "adapter.xmra", IdentityAdapter(kDim, 2));
  FeatureMatrix emb(3, kDim);
  for (std::uint32_t i = 0; i < 3; ++i) {
    const auto t = ZeroMeanUnitVector(rng, kDim);
    for (std::uint32_t c = 0; c < kDim; ++c) emb.at(i, c) = t[c];
  }
  WriteFeatureMatrix(dir / "embeddings.xmrg", emb);

  nlohmann::ordered_json replay = nlohmann::ordered_json::array();
  replay.push_back({{"caption", "Cars on a road with a traffic light"},
                    {"completion", "Entity: cars, road, traffic light"}});
  replay.push_back({{"caption", "A bad answer"}, {"completion", "I cannot help with that."}});
  WriteBytes(dir / "llm_replay.json", replay.dump(2) + "\n");
  WriteBytes(dir / "generated.png", "\x89PNG\r\n\x1a\ngenerated fixture\n");
  return 0;
}
