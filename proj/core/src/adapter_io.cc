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

#include "xmrag/adapter_io.h"

#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include <json.hpp>

#include "xmrag/error.h"

namespace xmrag {

namespace {

constexpr char kMagic[4] = {'X', 'M', 'R', 'A'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kPreambleSize = 16;

void PutLe(std::string &out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t GetLe(const char *p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return v;
}

nlohmann::ordered_json ShapeToJson(const AdapterShape &s) {
  nlohmann::ordered_json j;
  j["vision_dim"] = s.vision_dim;
  j["text_dim"] = s.text_dim;
  j["model_dim"] = s.model_dim;
  j["heads"] = s.heads;
  j["query_tokens"] = s.query_tokens;
  j["hidden_dim"] = s.hidden_dim;
  j["out_dim"] = s.resolved_out_dim();
  return j;
}

AdapterShape ShapeFromJson(const nlohmann::json &j) {
  AdapterShape s;
  s.vision_dim = j.at("vision_dim").get<int>();
  s.text_dim = j.at("text_dim").get<int>();
  s.model_dim = j.at("model_dim").get<int>();
  s.heads = j.at("heads").get<int>();
  s.query_tokens = j.at("query_tokens").get<int>();
  s.hidden_dim = j.at("hidden_dim").get<int>();
  s.out_dim = j.at("out_dim").get<int>();
  return s;
}

}  // namespace

std::string EncodeAdapter(const AdapterParams &params) {
  params.Validate();
  nlohmann::ordered_json header;
  header["shape"] = ShapeToJson(params.shape);
  header["tensors"] = nlohmann::ordered_json::array();
  std::string payload;
  params.ForEach([&](const char *name, const Mat<float> &m) {
    FeatureMatrix fm(static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols()),
                     std::vector<float>(m.data(), m.data() + m.size()));
    const std::string blob = EncodeFeatureMatrix(fm);
    nlohmann::ordered_json t;
    t["name"] = name;
    t["rows"] = m.rows();
    t["cols"] = m.cols();
    t["offset"] = payload.size();
    t["length"] = blob.size();
    header["tensors"].push_back(t);
    payload += blob;
  });
  const std::string header_text = header.dump();
  std::string out(kMagic, 4);
  PutLe(out, kVersion, 4);
  PutLe(out, header_text.size(), 8);
  out += header_text;
  out += payload;
  return out;
}

AdapterParams DecodeAdapter(const std::string &bytes, const std::string &source) {
  if (bytes.size() < kPreambleSize || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw DataError(source + ": not an adapter file (bad magic)");
  }
  const auto version = GetLe(bytes.data() + 4, 4);
  if (version != kVersion) {
    throw DataError(source + ": unsupported adapter file version " + std::to_string(version));
  }
  const std::uint64_t header_len = GetLe(bytes.data() + 8, 8);
  if (header_len > bytes.size() - kPreambleSize) {
    throw DataError(source + ": header length exceeds file size");
  }
  const std::size_t payload_begin = kPreambleSize + header_len;
  const std::size_t payload_size = bytes.size() - payload_begin;

  AdapterParams params;
  try {
    const auto header = nlohmann::json::parse(bytes.begin() + kPreambleSize,
                                              bytes.begin() + static_cast<long>(payload_begin));
    params = AdapterParams::Zeros(ShapeFromJson(header.at("shape")));
    std::map<std::string, const nlohmann::json *> entries;
    for (const auto &t : header.at("tensors")) {
      entries[t.at("name").get<std::string>()] = &t;
    }
    params.ForEach([&](const char *name, Mat<float> &m) {
      auto it = entries.find(name);
      if (it == entries.end()) {
        throw DataError(source + ": missing tensor " + name);
      }
      const auto &t = *it->second;
      const auto offset = t.at("offset").get<std::uint64_t>();
      const auto length = t.at("length").get<std::uint64_t>();
      if (offset > payload_size || length > payload_size - offset) {
        throw DataError(source + ": tensor " + name + " lies outside the payload");
      }
      const FeatureMatrix fm = DecodeFeatureMatrix(
          std::span<const char>(bytes.data() + payload_begin + offset, length),
          source + ":" + name);
      if (fm.rows != m.rows() || fm.cols != m.cols() ||
          t.at("rows").get<std::int64_t>() != m.rows() ||
          t.at("cols").get<std::int64_t>() != m.cols()) {
        throw DataError(source + ": tensor " + name + " has the wrong shape");
      }
      std::copy(fm.values.begin(), fm.values.end(), m.data());
    });
  } catch (const nlohmann::json::exception &e) {
    throw DataError(source + ": malformed adapter header: " + e.what());
  }
  params.Validate();
  return params;
}

void SaveAdapter(const std::filesystem::path &path, const AdapterParams &params) {
  const std::string bytes = EncodeAdapter(params);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw DataError("write failure on " + path.string());
}

AdapterParams LoadAdapter(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open adapter file " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return DecodeAdapter(bytes, path.string());
}

}  // namespace xmrag
