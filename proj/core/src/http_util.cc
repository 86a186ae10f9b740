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

#include "http_util.h"

#include <openssl/evp.h>

#include <vector>

#include "xmrag/error.h"

namespace xmrag::internal {

ParsedUrl ParseUrl(const std::string &url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw UsageError("endpoint \"" + url + "\" is not an absolute URL");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw UsageError("endpoint \"" + url + "\" must use http or https");
  }
  const std::size_t host_begin = scheme_end + 3;
  const std::size_t path_begin = url.find('/', host_begin);
  ParsedUrl out;
  out.origin = url.substr(0, path_begin);
  out.target = path_begin == std::string::npos ? "/" : url.substr(path_begin);
  if (out.origin.size() <= host_begin) {
    throw UsageError("endpoint \"" + url + "\" has no host");
  }
  return out;
}

std::string Redact(std::string text, const std::string &secret) {
  if (secret.empty()) return text;
  static const std::string kMask = "[REDACTED]";
  for (std::size_t pos = text.find(secret); pos != std::string::npos;
       pos = text.find(secret, pos + kMask.size())) {
    text.replace(pos, secret.size(), kMask);
  }
  return text;
}

std::string Base64Encode(const std::string &bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char *>(out.data()),
                                reinterpret_cast<const unsigned char *>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string Base64Decode(const std::string &text) {
  std::string clean;
  clean.reserve(text.size());
  for (char c : text) {
    if (c != '\n' && c != '\r' && c != ' ') clean.push_back(c);
  }
  if (clean.size() % 4 != 0) throw ServiceError("malformed base64 payload");
  std::vector<unsigned char> out(3 * clean.size() / 4 + 1);
  const int n = EVP_DecodeBlock(out.data(),
                                reinterpret_cast<const unsigned char *>(clean.data()),
                                static_cast<int>(clean.size()));
  if (n < 0) throw ServiceError("malformed base64 payload");
  std::size_t len = static_cast<std::size_t>(n);
  // EVP_DecodeBlock counts padding bytes as zeros.
  if (!clean.empty() && clean.back() == '=') --len;
  if (clean.size() >= 2 && clean[clean.size() - 2] == '=') --len;
  return std::string(reinterpret_cast<const char *>(out.data()), len);
}

}  // namespace xmrag::internal
