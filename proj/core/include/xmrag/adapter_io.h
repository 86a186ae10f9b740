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

#include <filesystem>
#include <string>

#include "xmrag/adapter.h"

namespace xmrag {

/*! Adapter parameter file:
 *
 *    "XMRA" | u32 LE version (= 1) | u64 LE header length H |
 *    H bytes of UTF-8 JSON header | payload
 *
 *  The header is {"shape": {...}, "tensors": [{"name", "rows", "cols",
 *  "offset", "length"}, ...]}; offsets are relative to the payload start and
 *  each tensor's bytes form one complete XMRG matrix blob.
 */
std::string EncodeAdapter(const AdapterParams &params);
AdapterParams DecodeAdapter(const std::string &bytes,
                            const std::string &source = "<buffer>");

void SaveAdapter(const std::filesystem::path &path, const AdapterParams &params);
AdapterParams LoadAdapter(const std::filesystem::path &path);

}  // namespace xmrag
