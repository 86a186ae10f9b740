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

#include "xmrag/mllm_client.h"

#include <chrono>
#include <fstream>
#include <iterator>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "http_util.h"
#include "xmrag/error.h"

namespace xmrag {

namespace {

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read reference image " + path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

ReplayMllmClient ReplayMllmClient::FromFile(const std::filesystem::path &image_file) {
  return ReplayMllmClient(ReadFile(image_file.string()), "replay:" + image_file.filename().string());
}

GenerationResponse ReplayMllmClient::Generate(const GenerationRequest &request) {
  ++calls_;
  requests_.push_back(request);
  return GenerationResponse{bytes_, response_id_};
}

HttpMllmClient::HttpMllmClient(HttpMllmConfig config) : config_(std::move(config)) {
  internal::ParseUrl(config_.endpoint);
  if (config_.model.empty()) throw UsageError("image model name is empty");
  if (config_.max_retries < 0) throw UsageError("max_retries must be >= 0");
}

GenerationResponse HttpMllmClient::Generate(const GenerationRequest &request) {
  if (request.images.size() > config_.max_reference_images) {
    throw UsageError(std::to_string(request.images.size()) +
                     " reference images exceed the service limit of " +
                     std::to_string(config_.max_reference_images));
  }
  const auto url = internal::ParseUrl(config_.endpoint);
  httplib::MultipartFormDataItems items;
  items.push_back({"model", config_.model, "", ""});
  items.push_back({"prompt", request.prompt, "", ""});
  for (const auto &img : request.images) {
    const std::string name = std::filesystem::path(img.path).filename().string();
    items.push_back({"image[]", ReadFile(img.path), name, "application/octet-stream"});
  }
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  spdlog::debug("image request to {}: model={} prompt={} images={}", config_.endpoint,
                config_.model, internal::Redact(request.prompt, config_.api_key),
                request.images.size());

  const auto secs = static_cast<time_t>(config_.timeout_seconds);
  const auto usecs = static_cast<time_t>((config_.timeout_seconds - secs) * 1e6);
  double backoff = config_.initial_backoff_seconds;
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      spdlog::warn("image request failed ({}); retry {} of {} in {:.3f}s", last_error,
                   attempt, config_.max_retries, backoff);
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= 2.0;
    }
    attempts_.fetch_add(1);
    httplib::Client cli(url.origin);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    auto res = cli.Post(url.target, headers, items);
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    spdlog::debug("image response {} ({} bytes)", res->status, res->body.size());
    if (res->status >= 400) {
      throw ServiceError("image service returned HTTP " + std::to_string(res->status) +
                         ": " + res->body);
    }
    GenerationResponse out;
    try {
      const auto doc = nlohmann::json::parse(res->body);
      out.image_bytes =
          internal::Base64Decode(doc.at("data").at(0).at("b64_json").get<std::string>());
      if (doc.contains("id") && doc["id"].is_string()) {
        out.response_id = doc["id"].get<std::string>();
      }
    } catch (const nlohmann::json::exception &e) {
      throw ServiceError(std::string("unexpected image service response: ") + e.what());
    }
    if (out.response_id.empty()) out.response_id = res->get_header_value("x-request-id");
    return out;
  }
  throw ServiceError("image service transport failure after " +
                     std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
}

}  // namespace xmrag
