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
#include <string_view>
#include <vector>

namespace xmrag {

struct MatchOptions {
  //! Strip a trailing "s" from tokens longer than three characters that do
  //! not end in "ss". Off by default.
  bool strip_plural = false;

  friend bool operator==(const MatchOptions &, const MatchOptions &) = default;
};

/*! Normalizes UTF-8 text into a token sequence.
 *
 *  NFC, then full Unicode lowercase, then split on whitespace and
 *  punctuation. Hyphens and apostrophes survive only between two
 *  letters/digits ("well-known", "don't"); all other punctuation is a
 *  separator. Invalid UTF-8 is replaced with U+FFFD before processing.
 */
std::vector<std::string> Tokenize(std::string_view text,
                                  const MatchOptions &options = {});

//! Tokens joined by single spaces; the canonical form used for duplicate
//! detection.
std::string NormalizeForCompare(std::string_view text,
                                const MatchOptions &options = {});

//! Leading and trailing ASCII/Unicode whitespace removed.
std::string Trim(std::string_view text);

}  // namespace xmrag
