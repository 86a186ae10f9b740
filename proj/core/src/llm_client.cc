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

#include "xmrag/llm_client.h"

#include <fstream>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "http_util.h"
#include "xmrag/error.h"
#include "xmrag/query.h"

namespace xmrag {

ReplayLlmClient ReplayLlmClient::FromFile(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open replay file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw DataError(path.string() + ": expected a JSON array");
  ReplayLlmClient client;
  for (const auto &entry : doc) {
    try {
      std::string completion = entry.at("completion").get<std::string>();
      if (entry.contains("prompt")) {
        client.Add(entry.at("prompt").get<std::string>(), std::move(completion));
      } else {
        client.Add(RenderDecomposePrompt(entry.at("caption").get<std::string>()),
                   std::move(completion));
      }
    } catch (const nlohmann::json::exception &e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  return client;
}

void ReplayLlmClient::Add(std::string prompt, std::string completion) {
  responses_[std::move(prompt)] = std::move(completion);
}

std::string ReplayLlmClient::Complete(const std::string &prompt) {
  calls_.fetch_add(1);
  auto it = responses_.find(prompt);
  if (it == responses_.end()) {
    throw ServiceError("replay client has no completion for this prompt");
  }
  return it->second;
}

HttpLlmClient::HttpLlmClient(HttpLlmConfig config) : config_(std::move(config)) {
  internal::ParseUrl(config_.endpoint);
  if (config_.model.empty()) throw UsageError("LLM model name is empty");
}

std::string HttpLlmClient::Complete(const std::string &prompt) {
  const auto url = internal::ParseUrl(config_.endpoint);
  nlohmann::json body = {
      {"model", config_.model},
      {"messages", {{{"role", "user"}, {"content", prompt}}}},
      {"temperature", 0},
  };
  const std::string payload = body.dump();

  httplib::Client cli(url.origin);
  const auto secs = static_cast<time_t>(config_.timeout_seconds);
  const auto usecs = static_cast<time_t>((config_.timeout_seconds - secs) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  spdlog::debug("llm request to {}: {}", config_.endpoint,
                internal::Redact(payload, config_.api_key));

  auto res = cli.Post(url.target, headers, payload, "application/json");
  if (!res) {
    throw ServiceError("LLM transport failure: " + httplib::to_string(res.error()));
  }
  spdlog::debug("llm response {}: {}", res->status,
                internal::Redact(res->body, config_.api_key));
  if (res->status >= 400) {
    throw ServiceError("LLM service returned HTTP " + std::to_string(res->status) +
                       ": " + res->body);
  }
  try {
    const auto doc = nlohmann::json::parse(res->body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception &e) {
    throw CompletionParseError(std::string("unexpected LLM response shape: ") + e.what(),
                               res->body);
  }
}

}  // namespace xmrag
