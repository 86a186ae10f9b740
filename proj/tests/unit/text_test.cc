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

#include <gtest/gtest.h>

namespace xmrag {
namespace {

using Tokens = std::vector<std::string>;

TEST(Tokenize, LowercasesAndSplitsOnPunctuation) {
  EXPECT_EQ(Tokenize("Cars, ROAD; Traffic-Light!"), (Tokens{"cars", "road", "traffic-light"}));
}

TEST(Tokenize, KeepsJoinersOnlyBetweenWordCharacters) {
  EXPECT_EQ(Tokenize("don't -dash- end-"), (Tokens{"don't", "dash", "end"}));
  EXPECT_EQ(Tokenize("rock’n roll"), (Tokens{"rock’n", "roll"}));
}

TEST(Tokenize, NormalizesComposedAndDecomposedForms) {
  // U+00E9 versus e + U+0301.
  EXPECT_EQ(Tokenize("Caf\u00e9"), Tokenize("Cafe\u0301"));
  EXPECT_EQ(Tokenize("CAFE\u0301"), (Tokens{"caf\u00e9"}));
}

TEST(Tokenize, HandlesNonLatinScripts) {
  EXPECT_EQ(Tokenize("街道 Δρόμος"),
            (Tokens{"街道", "δρόμος"}));
}

TEST(Tokenize, DigitsAreWordCharacters) {
  EXPECT_EQ(Tokenize("route 66."), (Tokens{"route", "66"}));
}

TEST(Tokenize, EmptyAndPunctuationOnly) {
  EXPECT_TRUE(Tokenize("").empty());
  EXPECT_TRUE(Tokenize(" ,.;- ").empty());
}

TEST(Tokenize, PluralStrippingIsOptIn) {
  MatchOptions strip;
  strip.strip_plural = true;
  EXPECT_EQ(Tokenize("cars glass bus"), (Tokens{"cars", "glass", "bus"}));
  EXPECT_EQ(Tokenize("cars glass bus", strip), (Tokens{"car", "glass", "bus"}));
}

TEST(NormalizeForCompare, JoinsTokensWithSingleSpaces) {
  EXPECT_EQ(NormalizeForCompare("  Traffic   LIGHT. "), "traffic light");
}

TEST(Trim, StripsUnicodeWhitespace) {
  EXPECT_EQ(Trim("　 hello world\t\n"), "hello world");
  EXPECT_EQ(Trim("   "), "");
}

}  // namespace
}  // namespace xmrag
