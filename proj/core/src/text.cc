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

#include "xmrag/text.h"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "xmrag/error.h"

namespace xmrag {

namespace {

bool IsJoiner(UChar32 c) {
  return c == 0x2D || c == 0x2010 || c == 0x27 || c == 0x2019;
}

// Letters, digits and combining marks form token bodies.
bool IsWordChar(UChar32 c) {
  const int8_t type = u_charType(c);
  switch (type) {
    case U_UPPERCASE_LETTER:
    case U_LOWERCASE_LETTER:
    case U_TITLECASE_LETTER:
    case U_MODIFIER_LETTER:
    case U_OTHER_LETTER:
    case U_DECIMAL_DIGIT_NUMBER:
    case U_LETTER_NUMBER:
    case U_OTHER_NUMBER:
    case U_NON_SPACING_MARK:
    case U_ENCLOSING_MARK:
    case U_COMBINING_SPACING_MARK:
      return true;
    default:
      return false;
  }
}

icu::UnicodeString NormalizeUnicode(std::string_view text) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw DataError(std::string("ICU NFC normalizer unavailable: ") +
                    u_errorName(status));
  }
  icu::UnicodeString out = nfc->normalize(s, status);
  if (U_FAILURE(status)) {
    throw DataError(std::string("NFC normalization failed: ") +
                    u_errorName(status));
  }
  out.toLower(icu::Locale::getRoot());
  // Lowercasing can produce decomposed sequences; recompose.
  out = nfc->normalize(out, status);
  if (U_FAILURE(status)) {
    throw DataError(std::string("NFC normalization failed: ") +
                    u_errorName(status));
  }
  return out;
}

void StripPlural(std::string &token) {
  if (token.size() > 3 && token.back() == 's' &&
      token[token.size() - 2] != 's') {
    token.pop_back();
  }
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text,
                                  const MatchOptions &options) {
  const icu::UnicodeString s = NormalizeUnicode(text);
  std::vector<UChar32> cps;
  cps.reserve(static_cast<std::size_t>(s.length()));
  for (int32_t i = 0; i < s.length(); i = s.moveIndex32(i, 1)) {
    cps.push_back(s.char32At(i));
  }

  std::vector<std::string> tokens;
  icu::UnicodeString current;
  auto flush = [&] {
    if (current.isEmpty()) return;
    std::string utf8;
    current.toUTF8String(utf8);
    if (options.strip_plural) StripPlural(utf8);
    tokens.push_back(std::move(utf8));
    current.remove();
  };

  for (std::size_t i = 0; i < cps.size(); ++i) {
    const UChar32 c = cps[i];
    if (IsWordChar(c)) {
      current.append(c);
    } else if (IsJoiner(c) && !current.isEmpty() && i + 1 < cps.size() &&
               IsWordChar(cps[i + 1])) {
      current.append(c);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::string NormalizeForCompare(std::string_view text,
                                const MatchOptions &options) {
  std::string out;
  for (const auto &t : Tokenize(text, options)) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string Trim(std::string_view text) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  int32_t begin = 0;
  int32_t end = s.length();
  while (begin < end && u_isUWhiteSpace(s.char32At(begin))) {
    begin = s.moveIndex32(begin, 1);
  }
  while (end > begin) {
    const int32_t prev = s.moveIndex32(end, -1);
    if (!u_isUWhiteSpace(s.char32At(prev))) break;
    end = prev;
  }
  std::string out;
  s.tempSubStringBetween(begin, end).toUTF8String(out);
  return out;
}

}  // namespace xmrag
