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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "xmrag/llm_client.h"
#include "xmrag/mllm_client.h"

namespace xmrag::cli {

//! Runtime settings shared by every subcommand.
struct EngineConfig {
  std::string manifest;
  std::string adapter;     //!< adapter params file; empty disables dense scoring
  std::string embeddings;  //!< XMRG file with one row per subquery
  std::optional<double> beta;
  int grid_resolution = 10;
  bool support_vectors = true;
  bool strip_plurals = false;
  bool offline = false;
  std::uint64_t seed = 0;
  int jobs = 0;  //!< < 1 means available parallelism

  std::string decomposer = "rule";  //!< "rule" or "llm"
  std::string llm_replay;           //!< replay file for the LLM client
  HttpLlmConfig llm;
  std::string mllm_replay;          //!< canned image for the MLLM client
  HttpMllmConfig mllm;

  //! Throws UsageError when grid_resolution < 1, beta <= 0 or the
  //! decomposer name is unknown.
  void Validate() const;
};

/*! Overlays the keys of a JSON object onto `config`. Unknown keys and
 *  mistyped values raise UsageError. Recognized keys: manifest, adapter,
 *  embeddings, beta, grid_resolution, support_vectors, strip_plurals,
 *  offline, seed, jobs, decomposer, llm_replay, mllm_replay,
 *  llm {endpoint, model, api_key, timeout_seconds},
 *  mllm {endpoint, model, api_key, max_reference_images, timeout_seconds,
 *        max_retries, initial_backoff_seconds}.
 */
void ApplyConfigJson(const nlohmann::json &j, EngineConfig &config);

//! Reads and applies a JSON config file.
void ApplyConfigFile(const std::filesystem::path &path, EngineConfig &config);

using EnvLookup = std::function<std::optional<std::string>(const char *)>;

//! Process environment lookup.
std::optional<std::string> GetEnv(const char *name);

//! API keys from XMRAG_LLM_API_KEY and XMRAG_MLLM_API_KEY override the
//! config file.
void ApplyEnv(const EnvLookup &env, EngineConfig &config);

}  // namespace xmrag::cli
