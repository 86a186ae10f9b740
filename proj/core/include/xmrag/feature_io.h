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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace xmrag {

/*! XMRG matrix file layout (all integers little-endian):
 *
 *    offset  size  field
 *    0       4     magic "XMRG"
 *    4       4     format version (u32, = 1)
 *    8       4     rows (u32)
 *    12      4     cols (u32)
 *    16      4*r*c IEEE-754 binary32 values, row-major
 *
 *  Used for vision token features (rows = tokens) and text embeddings
 *  (rows = texts).
 */
inline constexpr char kXmrgMagic[4] = {'X', 'M', 'R', 'G'};
inline constexpr std::uint32_t kXmrgVersion = 1;
inline constexpr std::size_t kXmrgHeaderSize = 16;

struct FeatureMatrix {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<float> values;

  FeatureMatrix() = default;
  FeatureMatrix(std::uint32_t r, std::uint32_t c)
      : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, 0.0f) {}
  FeatureMatrix(std::uint32_t r, std::uint32_t c, std::vector<float> v)
      : rows(r), cols(c), values(std::move(v)) {}

  float &at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  float at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

  std::span<const float> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }

  //! Throws DataError unless rows >= 1, cols >= 1, sizes agree and all
  //! values are finite.
  void Validate() const;

  friend bool operator==(const FeatureMatrix &, const FeatureMatrix &) = default;
};

//! Serializes to the XMRG byte layout. Validates first.
std::string EncodeFeatureMatrix(const FeatureMatrix &m);

//! Parses an XMRG blob. `source` names the blob in error messages.
FeatureMatrix DecodeFeatureMatrix(std::span<const char> bytes,
                                  const std::string &source = "<buffer>");

FeatureMatrix ReadFeatureMatrix(const std::filesystem::path &path);

void WriteFeatureMatrix(const std::filesystem::path &path,
                        const FeatureMatrix &m);

}  // namespace xmrag
