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
#include <string>
#include <vector>

namespace xmrag {

inline constexpr const char *kMllmApiKeyEnv = "XMRAG_MLLM_API_KEY";
inline constexpr const char *kDefaultMllmModel = "gpt-image-1";

struct ReferenceImage {
  std::string id;
  //! Path of the image file to upload.
  std::string path;
};

struct GenerationRequest {
  std::string prompt;
  std::vector<ReferenceImage> images;
};

struct GenerationResponse {
  std::string image_bytes;
  std::string response_id;
};

//! Multimodal image-generation service.
class MllmClient {
 public:
  virtual ~MllmClient() = default;
  virtual GenerationResponse Generate(const GenerationRequest &request) = 0;
};

//! Returns canned bytes and records every request it sees.
class ReplayMllmClient : public MllmClient {
 public:
  explicit ReplayMllmClient(std::string image_bytes, std::string response_id = "replay")
      : bytes_(std::move(image_bytes)), response_id_(std::move(response_id)) {}

  static ReplayMllmClient FromFile(const std::filesystem::path &image_file);

  GenerationResponse Generate(const GenerationRequest &request) override;

  std::size_t calls() const { return calls_; }
  const std::vector<GenerationRequest> &requests() const { return requests_; }

 private:
  std::string bytes_;
  std::string response_id_;
  std::size_t calls_ = 0;
  std::vector<GenerationRequest> requests_;
};

struct HttpMllmConfig {
  //! Full URL of an image-edit style endpoint accepting multipart uploads.
  std::string endpoint;
  std::string model = kDefaultMllmModel;
  std::string api_key;
  std::size_t max_reference_images = 16;
  double timeout_seconds = 120.0;
  //! Retries after the first attempt, for transport failures only.
  int max_retries = 3;
  //! Delay before the first retry; doubles each time.
  double initial_backoff_seconds = 0.5;
};

/*! Sends multipart/form-data with fields "model", "prompt" and one "image[]"
 *  file per reference image. Expects JSON {"data": [{"b64_json": ...}]};
 *  the response id is taken from "id" or the x-request-id header. HTTP
 *  errors are raised as ServiceError carrying the status and body verbatim.
 */
class HttpMllmClient : public MllmClient {
 public:
  explicit HttpMllmClient(HttpMllmConfig config);

  GenerationResponse Generate(const GenerationRequest &request) override;

  const HttpMllmConfig &config() const { return config_; }

  //! Number of HTTP attempts made so far (including retries).
  std::size_t attempts() const { return attempts_.load(); }

 private:
  HttpMllmConfig config_;
  std::atomic<std::size_t> attempts_{0};
};

}  // namespace xmrag
