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

#include <gtest/gtest.h>

#include "test_util.h"
#include "xmrag/error.h"

namespace xmrag {
namespace {

using testing::TempDir;
using testing::WriteFile;

void WriteFeature(const std::filesystem::path &p) {
  WriteFeatureMatrix(p, FeatureMatrix(1, 2, {0.5f, -0.5f}));
}

TEST(Corpus, BuildsSortedPostings) {
  std::vector<ImageRecord> records = {
      {"b", "Red car", "b.xmrg", {}},
      {"a", "A red bus and a red car", "a.xmrg", {}},
  };
  const Corpus corpus(std::move(records), nullptr);
  ASSERT_EQ(corpus.size(), 2u);
  const auto red = corpus.postings("red");
  EXPECT_EQ(std::vector<std::uint32_t>(red.begin(), red.end()), (std::vector<std::uint32_t>{0, 1}));
  const auto bus = corpus.postings("bus");
  EXPECT_EQ(std::vector<std::uint32_t>(bus.begin(), bus.end()), (std::vector<std::uint32_t>{1}));
  EXPECT_TRUE(corpus.postings("boat").empty());
  // red, car, a, bus, and
  EXPECT_EQ(corpus.distinct_tokens(), 5u);
  EXPECT_EQ(corpus.tokens(1), (std::vector<std::string>{"a", "red", "bus", "and", "a", "red", "car"}));
}

TEST(Corpus, RejectsDuplicateIds) {
  std::vector<ImageRecord> records = {{"a", "x", "a", {}}, {"a", "y", "b", {}}};
  EXPECT_THROW(Corpus(std::move(records), nullptr), DataError);
}

TEST(Corpus, CountsFeatureLoads) {
  std::vector<FeatureMatrix> features = {FeatureMatrix(1, 1, {1.0f}), FeatureMatrix(1, 1, {2.0f})};
  const Corpus corpus({{"a", "x", "", {}}, {"b", "y", "", {}}},
                      std::make_shared<InMemoryFeatureSource>(features));
  EXPECT_EQ(corpus.Features(1).values, (std::vector<float>{2.0f}));
  EXPECT_EQ(corpus.Features(0).values, (std::vector<float>{1.0f}));
  EXPECT_EQ(corpus.feature_loads(), 2u);
  EXPECT_THROW(corpus.Features(2), DataError);
}

TEST(LoadCorpus, ReadsManifestAndResolvesPaths) {
  TempDir dir;
  std::filesystem::create_directories(dir / "f");
  WriteFeature(dir / "f/a.xmrg");
  WriteFeature(dir / "f/b.xmrg");
  WriteFile(dir / "m.jsonl",
            "{\"id\": \"a\", \"caption\": \"A dog\", \"feature_ref\": \"f/a.xmrg\"}\n"
            "\n"
            "{\"id\": \"b\", \"caption\": \"A cat\", \"feature_ref\": \"f/b.xmrg\","
            " \"meta\": {\"image_path\": \"img/b.png\"}}\n");
  const Corpus corpus = LoadCorpus(dir / "m.jsonl");
  ASSERT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus.record(1).meta.at("image_path"), "img/b.png");
  EXPECT_EQ(corpus.ResolvedImageRef(0), "a");
  EXPECT_EQ(corpus.ResolvedImageRef(1), (dir.path() / "img/b.png").string());
  EXPECT_EQ(corpus.Features(1), FeatureMatrix(1, 2, {0.5f, -0.5f}));
}

TEST(LoadCorpus, EmptyManifestHasNoRecords) {
  TempDir dir;
  WriteFile(dir / "m.jsonl", "");
  EXPECT_EQ(LoadCorpus(dir / "m.jsonl").size(), 0u);
}

TEST(LoadCorpus, ReportsMalformedLineNumber) {
  TempDir dir;
  WriteFeature(dir / "a.xmrg");
  WriteFile(dir / "m.jsonl",
            "{\"id\": \"a\", \"caption\": \"x\", \"feature_ref\": \"a.xmrg\"}\n"
            "{\"id\": \"b\", \"caption\": \n");
  try {
    LoadCorpus(dir / "m.jsonl");
    FAIL();
  } catch (const DataError &e) {
    EXPECT_NE(std::string(e.what()).find("malformed manifest line 2"), std::string::npos) << e.what();
  }
}

TEST(LoadCorpus, ReportsMissingFields) {
  TempDir dir;
  WriteFile(dir / "m.jsonl", "{\"id\": \"a\", \"feature_ref\": \"a.xmrg\"}\n");
  EXPECT_THROW(LoadCorpus(dir / "m.jsonl"), DataError);
}

TEST(LoadCorpus, ReportsDuplicateId) {
  TempDir dir;
  WriteFeature(dir / "a.xmrg");
  WriteFile(dir / "m.jsonl",
            "{\"id\": \"a\", \"caption\": \"x\", \"feature_ref\": \"a.xmrg\"}\n"
            "{\"id\": \"a\", \"caption\": \"y\", \"feature_ref\": \"a.xmrg\"}\n");
  try {
    LoadCorpus(dir / "m.jsonl");
    FAIL();
  } catch (const DataError &e) {
    EXPECT_NE(std::string(e.what()).find("duplicate id \"a\""), std::string::npos);
  }
}

TEST(LoadCorpus, ReportsMissingFeatureFile) {
  TempDir dir;
  WriteFile(dir / "m.jsonl", "{\"id\": \"a\", \"caption\": \"x\", \"feature_ref\": \"nope.xmrg\"}\n");
  try {
    LoadCorpus(dir / "m.jsonl");
    FAIL();
  } catch (const DataError &e) {
    EXPECT_NE(std::string(e.what()).find("missing feature file"), std::string::npos);
  }
}

TEST(LoadCorpus, MissingManifestIsDataError) {
  EXPECT_THROW(LoadCorpus("/nonexistent/m.jsonl"), DataError);
}

TEST(SaveCorpus, RoundTrips) {
  TempDir dir;
  std::vector<FeatureMatrix> features = {FeatureMatrix(1, 2, {1.0f, 2.0f}),
                                         FeatureMatrix(2, 2, {3.0f, 4.0f, 5.0f, 6.0f})};
  const Corpus original({{"x", "First caption", "", {{"k", "v"}}}, {"y", "Second", "", {}}},
                        std::make_shared<InMemoryFeatureSource>(features));
  const auto manifest = SaveCorpus(original, dir.path());
  const Corpus loaded = LoadCorpus(manifest);
  ASSERT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded.record(0).caption, "First caption");
  EXPECT_EQ(loaded.record(0).meta.at("k"), "v");
  EXPECT_EQ(loaded.Features(1), features[1]);
  EXPECT_EQ(loaded.tokens(0), original.tokens(0));
}

}  // namespace
}  // namespace xmrag
