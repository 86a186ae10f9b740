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

#include "xmrag/feature_io.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "xmrag/error.h"

namespace xmrag {

namespace {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);

void PutU32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t GetU32(const char *p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return v;
}

}  // namespace

void FeatureMatrix::Validate() const {
  if (rows == 0 || cols == 0) {
    throw DataError("feature matrix must have rows >= 1 and cols >= 1, got " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (values.size() != static_cast<std::size_t>(rows) * cols) {
    throw DataError("feature matrix holds " + std::to_string(values.size()) +
                    " values, expected " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw DataError("non-finite feature value at row " +
                      std::to_string(i / cols) + ", col " +
                      std::to_string(i % cols));
    }
  }
}

std::string EncodeFeatureMatrix(const FeatureMatrix &m) {
  m.Validate();
  std::string out;
  out.reserve(kXmrgHeaderSize + m.values.size() * 4);
  out.append(kXmrgMagic, 4);
  PutU32(out, kXmrgVersion);
  PutU32(out, m.rows);
  PutU32(out, m.cols);
  for (float f : m.values) PutU32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

FeatureMatrix DecodeFeatureMatrix(std::span<const char> bytes,
                                  const std::string &source) {
  if (bytes.size() < kXmrgHeaderSize) {
    throw DataError(source + ": size mismatch: " + std::to_string(bytes.size()) +
                    " bytes is shorter than the XMRG header");
  }
  if (std::memcmp(bytes.data(), kXmrgMagic, 4) != 0) {
    throw DataError(source + ": bad magic, expected \"XMRG\"");
  }
  const std::uint32_t version = GetU32(bytes.data() + 4);
  if (version != kXmrgVersion) {
    throw DataError(source + ": unsupported XMRG version " +
                    std::to_string(version));
  }
  const std::uint32_t rows = GetU32(bytes.data() + 8);
  const std::uint32_t cols = GetU32(bytes.data() + 12);
  if (rows == 0 || cols == 0) {
    throw DataError(source + ": invalid header: rows=" + std::to_string(rows) +
                    " cols=" + std::to_string(cols));
  }
  const std::uint64_t count = static_cast<std::uint64_t>(rows) * cols;
  const std::uint64_t expected = kXmrgHeaderSize + count * 4;
  if (bytes.size() != expected) {
    throw DataError(source + ": size mismatch: header declares " +
                    std::to_string(rows) + "x" + std::to_string(cols) +
                    " (" + std::to_string(expected) + " bytes), file has " +
                    std::to_string(bytes.size()));
  }
  FeatureMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.values.resize(count);
  const char *p = bytes.data() + kXmrgHeaderSize;
  for (std::uint64_t i = 0; i < count; ++i, p += 4) {
    m.values[i] = std::bit_cast<float>(GetU32(p));
  }
  try {
    m.Validate();
  } catch (const DataError &e) {
    throw DataError(source + ": " + e.what());
  }
  return m;
}

FeatureMatrix ReadFeatureMatrix(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature file " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) throw DataError("read failure on " + path.string());
  return DecodeFeatureMatrix(bytes, path.string());
}

void WriteFeatureMatrix(const std::filesystem::path &path,
                        const FeatureMatrix &m) {
  const std::string bytes = EncodeFeatureMatrix(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw DataError("write failure on " + path.string());
}

}  // namespace xmrag
