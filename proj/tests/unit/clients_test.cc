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

#include <atomic>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "test_util.h"
#include "xmrag/error.h"
#include "xmrag/llm_client.h"
#include "xmrag/mllm_client.h"
#include "xmrag/query.h"

namespace xmrag {
namespace {

std::string Base64(const std::string &bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char *>(out.data()),
                                reinterpret_cast<const unsigned char *>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

//! Local HTTP server on an ephemeral port, stopped on destruction.
class LocalServer {
 public:
  LocalServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server &server() { return server_; }
  std::string Url(const std::string &path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(ReplayLlmClient, ServesCaptionEntriesAndCountsCalls) {
  auto client = ReplayLlmClient::FromFile(testing::FixtureDir() / "in_context_replay.json");
  const auto doc = nlohmann::json::parse(testing::ReadFile(testing::FixtureDir() / "in_context_replay.json"));
  const std::string caption = doc[0]["caption"];
  EXPECT_EQ(client.Complete(RenderDecomposePrompt(caption)), doc[0]["completion"].get<std::string>());
  EXPECT_EQ(client.calls(), 1u);
  EXPECT_THROW(client.Complete("unknown prompt"), ServiceError);
  EXPECT_THROW(ReplayLlmClient::FromFile("/nonexistent.json"), DataError);
}

TEST(HttpLlmClient, SendsChatRequest) {
  LocalServer srv;
  nlohmann::json seen;
  std::string auth;
  srv.server().Post("/v1/chat", [&](const httplib::Request &req, httplib::Response &res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices":[{"message":{"content":"Entity: a, b"}}]})",
                    "application/json");
  });
  HttpLlmClient client({srv.Url("/v1/chat"), "m1", "sekret", 5.0});
  EXPECT_EQ(client.Complete("hello"), "Entity: a, b");
  EXPECT_EQ(seen["model"], "m1");
  EXPECT_EQ(seen["temperature"], 0);
  EXPECT_EQ(seen["messages"][0]["role"], "user");
  EXPECT_EQ(seen["messages"][0]["content"], "hello");
  EXPECT_EQ(auth, "Bearer sekret");
}

TEST(HttpLlmClient, SurfacesHttpErrorsAndBadShapes) {
  LocalServer srv;
  srv.server().Post("/err", [](const httplib::Request &, httplib::Response &res) {
    res.status = 503;
    res.set_content("overloaded", "text/plain");
  });
  srv.server().Post("/shape", [](const httplib::Request &, httplib::Response &res) {
    res.set_content(R"({"choices":[]})", "application/json");
  });
  HttpLlmClient err({srv.Url("/err"), "m", "", 5.0});
  try {
    err.Complete("x");
    FAIL();
  } catch (const ServiceError &e) {
    EXPECT_NE(std::string(e.what()).find("503"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("overloaded"), std::string::npos);
  }
  HttpLlmClient shape({srv.Url("/shape"), "m", "", 5.0});
  try {
    shape.Complete("x");
    FAIL();
  } catch (const CompletionParseError &e) {
    EXPECT_EQ(e.completion(), R"({"choices":[]})");
  }
  EXPECT_THROW(HttpLlmClient({"ftp://x", "m", "", 1.0}), UsageError);
  EXPECT_THROW(HttpLlmClient({"http://x/", "", "", 1.0}), UsageError);
}

TEST(HttpMllmClient, SendsMultipartAndDecodesImage) {
  testing::TempDir dir;
  testing::WriteFile(dir / "ref.png", "REFBYTES");
  LocalServer srv;
  std::string model, prompt, file_body, file_name;
  std::size_t files = 0;
  srv.server().Post("/edit", [&](const httplib::Request &req, httplib::Response &res) {
    model = req.get_file_value("model").content;
    prompt = req.get_file_value("prompt").content;
    files = req.get_file_values("image[]").size();
    file_body = req.get_file_value("image[]").content;
    file_name = req.get_file_value("image[]").filename;
    res.set_header("x-request-id", "req-7");
    res.set_content(R"({"data":[{"b64_json":")" + Base64("PNGDATA") + R"("}]})",
                    "application/json");
  });
  HttpMllmConfig config;
  config.endpoint = srv.Url("/edit");
  HttpMllmClient client(config);
  const auto out = client.Generate({"draw", {{"r1", (dir / "ref.png").string()}}});
  EXPECT_EQ(out.image_bytes, "PNGDATA");
  EXPECT_EQ(out.response_id, "req-7");
  EXPECT_EQ(model, kDefaultMllmModel);
  EXPECT_EQ(prompt, "draw");
  EXPECT_EQ(files, 1u);
  EXPECT_EQ(file_body, "REFBYTES");
  EXPECT_EQ(file_name, "ref.png");
  EXPECT_EQ(client.attempts(), 1u);
}

TEST(HttpMllmClient, HttpErrorsAreNotRetried) {
  LocalServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/edit", [&](const httplib::Request &, httplib::Response &res) {
    ++hits;
    res.status = 400;
    res.set_content("bad prompt", "text/plain");
  });
  HttpMllmConfig config;
  config.endpoint = srv.Url("/edit");
  config.initial_backoff_seconds = 0.001;
  HttpMllmClient client(config);
  try {
    client.Generate({"draw", {}});
    FAIL();
  } catch (const ServiceError &e) {
    EXPECT_NE(std::string(e.what()).find("bad prompt"), std::string::npos);
  }
  EXPECT_EQ(hits.load(), 1);
  EXPECT_EQ(client.attempts(), 1u);
}

TEST(HttpMllmClient, RetriesTransportFailures) {
  HttpMllmConfig config;
  config.endpoint = "http://127.0.0.1:1/edit";
  config.max_retries = 2;
  config.initial_backoff_seconds = 0.001;
  config.timeout_seconds = 1.0;
  HttpMllmClient client(config);
  EXPECT_THROW(client.Generate({"draw", {}}), ServiceError);
  EXPECT_EQ(client.attempts(), 3u);
}

TEST(HttpMllmClient, EnforcesReferenceLimit) {
  HttpMllmConfig config;
  config.endpoint = "http://127.0.0.1:1/edit";
  config.max_reference_images = 1;
  HttpMllmClient client(config);
  EXPECT_THROW(client.Generate({"d", {{"a", "a"}, {"b", "b"}}}), UsageError);
  EXPECT_EQ(client.attempts(), 0u);
  config.max_retries = -1;
  EXPECT_THROW(HttpMllmClient{config}, UsageError);
}

TEST(ReplayMllmClient, FromFile) {
  testing::TempDir dir;
  testing::WriteFile(dir / "g.png", "IMG");
  auto client = ReplayMllmClient::FromFile(dir / "g.png");
  const auto out = client.Generate({"p", {}});
  EXPECT_EQ(out.image_bytes, "IMG");
  EXPECT_EQ(out.response_id, "replay:g.png");
}

}  // namespace
}  // namespace xmrag
