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
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>

namespace xmrag {

inline constexpr const char *kLlmApiKeyEnv = "XMRAG_LLM_API_KEY";

//! Text completion service used for query decomposition.
class LlmClient {
 public:
  virtual ~LlmClient() = default;

  //! Returns the completion for a single-turn user prompt. Throws
  //! ServiceError on transport or protocol failure.
  virtual std::string Complete(const std::string &prompt) = 0;
};

//! Canned prompt -> completion map. Unknown prompts raise ServiceError.
class ReplayLlmClient : public LlmClient {
 public:
  ReplayLlmClient() = default;
  explicit ReplayLlmClient(std::map<std::string, std::string> responses)
      : responses_(std::move(responses)) {}
  ReplayLlmClient(ReplayLlmClient &&other) noexcept
      : responses_(std::move(other.responses_)), calls_(other.calls_.load()) {}

  /*! Loads a JSON array of {"prompt": str, "completion": str} or
   *  {"caption": str, "completion": str} objects. Caption entries are keyed
   *  by the rendered decomposition prompt for that caption.
   */
  static ReplayLlmClient FromFile(const std::filesystem::path &path);

  void Add(std::string prompt, std::string completion);

  std::string Complete(const std::string &prompt) override;

  std::size_t calls() const { return calls_.load(); }

 private:
  std::map<std::string, std::string> responses_;
  std::atomic<std::size_t> calls_{0};
};

struct HttpLlmConfig {
  //! Full URL of an OpenAI-style chat-completions endpoint.
  std::string endpoint;
  std::string model;
  //! Sent as a bearer token; empty means no Authorization header.
  std::string api_key;
  double timeout_seconds = 60.0;
};

/*! POSTs {"model", "messages": [{"role": "user", "content": prompt}],
 *  "temperature": 0} and returns choices[0].message.content. Safe to share
 *  across threads; each call opens its own connection.
 */
class HttpLlmClient : public LlmClient {
 public:
  explicit HttpLlmClient(HttpLlmConfig config);

  std::string Complete(const std::string &prompt) override;

  const HttpLlmConfig &config() const { return config_; }

 private:
  HttpLlmConfig config_;
};

}  // namespace xmrag
