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

#include <string>

namespace xmrag::internal {

struct ParsedUrl {
  //! "scheme://host[:port]", the form httplib::Client accepts.
  std::string origin;
  //! Path plus query string, always starting with '/'.
  std::string target;
};

//! Splits an http(s) URL. Throws UsageError on anything else.
ParsedUrl ParseUrl(const std::string &url);

//! Replaces every occurrence of `secret` in `text` with "[REDACTED]".
std::string Redact(std::string text, const std::string &secret);

//! Bytes <-> standard base64 (with padding).
std::string Base64Encode(const std::string &bytes);
std::string Base64Decode(const std::string &text);

}  // namespace xmrag::internal
