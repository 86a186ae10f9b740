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

#include "config.h"

#include <cstdlib>
#include <fstream>

#include "xmrag/error.h"

namespace xmrag::cli {

namespace {

template <typename T>
void Read(const nlohmann::json &j, const char *key, T &out, const std::string &scope) {
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception &) {
    throw UsageError("config key \"" + scope + key + "\" has the wrong type");
  }
}

void ApplyLlm(const nlohmann::json &j, HttpLlmConfig &c) {
  if (!j.is_object()) throw UsageError("config key \"llm\" must be an object");
  for (const auto &[key, value] : j.items()) {
    if (key == "endpoint") Read(j, "endpoint", c.endpoint, "llm.");
    else if (key == "model") Read(j, "model", c.model, "llm.");
    else if (key == "api_key") Read(j, "api_key", c.api_key, "llm.");
    else if (key == "timeout_seconds") Read(j, "timeout_seconds", c.timeout_seconds, "llm.");
    else throw UsageError("unknown config key \"llm." + key + "\"");
  }
}

void ApplyMllm(const nlohmann::json &j, HttpMllmConfig &c) {
  if (!j.is_object()) throw UsageError("config key \"mllm\" must be an object");
  for (const auto &[key, value] : j.items()) {
    if (key == "endpoint") Read(j, "endpoint", c.endpoint, "mllm.");
    else if (key == "model") Read(j, "model", c.model, "mllm.");
    else if (key == "api_key") Read(j, "api_key", c.api_key, "mllm.");
    else if (key == "max_reference_images") Read(j, "max_reference_images", c.max_reference_images, "mllm.");
    else if (key == "timeout_seconds") Read(j, "timeout_seconds", c.timeout_seconds, "mllm.");
    else if (key == "max_retries") Read(j, "max_retries", c.max_retries, "mllm.");
    else if (key == "initial_backoff_seconds") Read(j, "initial_backoff_seconds", c.initial_backoff_seconds, "mllm.");
    else throw UsageError("unknown config key \"mllm." + key + "\"");
  }
}

}  // namespace

void EngineConfig::Validate() const {
  if (grid_resolution < 1) throw UsageError("grid resolution must be at least 1");
  if (beta && !(*beta > 0.0)) throw UsageError("beta must be positive");
  if (decomposer != "rule" && decomposer != "llm") {
    throw UsageError("decomposer must be \"rule\" or \"llm\"");
  }
}

void ApplyConfigJson(const nlohmann::json &j, EngineConfig &c) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto &[key, value] : j.items()) {
    if (key == "manifest") Read(j, "manifest", c.manifest, "");
    else if (key == "adapter") Read(j, "adapter", c.adapter, "");
    else if (key == "embeddings") Read(j, "embeddings", c.embeddings, "");
    else if (key == "beta") {
      double b = 0.0;
      Read(j, "beta", b, "");
      c.beta = b;
    } else if (key == "grid_resolution") Read(j, "grid_resolution", c.grid_resolution, "");
    else if (key == "support_vectors") Read(j, "support_vectors", c.support_vectors, "");
    else if (key == "strip_plurals") Read(j, "strip_plurals", c.strip_plurals, "");
    else if (key == "offline") Read(j, "offline", c.offline, "");
    else if (key == "seed") Read(j, "seed", c.seed, "");
    else if (key == "jobs") Read(j, "jobs", c.jobs, "");
    else if (key == "decomposer") Read(j, "decomposer", c.decomposer, "");
    else if (key == "llm_replay") Read(j, "llm_replay", c.llm_replay, "");
    else if (key == "mllm_replay") Read(j, "mllm_replay", c.mllm_replay, "");
    else if (key == "llm") ApplyLlm(value, c.llm);
    else if (key == "mllm") ApplyMllm(value, c.mllm);
    else throw UsageError("unknown config key \"" + key + "\"");
  }
}

void ApplyConfigFile(const std::filesystem::path &path, EngineConfig &config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error &e) {
    throw UsageError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  ApplyConfigJson(j, config);
}

std::optional<std::string> GetEnv(const char *name) {
  const char *v = std::getenv(name);
  if (v == nullptr) return std::nullopt;
  return std::string(v);
}

void ApplyEnv(const EnvLookup &env, EngineConfig &config) {
  if (auto k = env(kLlmApiKeyEnv)) config.llm.api_key = *k;
  if (auto k = env(kMllmApiKeyEnv)) config.mllm.api_key = *k;
}

}  // namespace xmrag::cli
