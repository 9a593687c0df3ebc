// Copyright 2026 The Anuvaad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "anuvaad/error.hpp"
#include "anuvaad/metrics/tokenizer.hpp"
#include "anuvaad/rng.hpp"
#include "anuvaad/text.hpp"

namespace anuvaad {
namespace {

using text::Normalization;

TEST(Utf8, DecodeEncodeRoundTrip) {
  const std::string s = "aéहि\U0001F600";
  const std::u32string cps = text::decode(s);
  ASSERT_EQ(cps.size(), 5u);
  EXPECT_EQ(cps[2], U'ह');
  EXPECT_EQ(text::encode(cps), s);
}

TEST(Utf8, RejectsInvalid) {
  for (std::string bad : {std::string("\xff"), std::string("\xc0\xaf"), std::string("\xe0\x80\x80"),
                          std::string("\xed\xa0\x80"), std::string("\xf4\x90\x80\x80"), std::string("ab\xe0\xa4")}) {
    try {
      text::decode(bad);
      ADD_FAILURE() << "accepted invalid UTF-8";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidUtf8);
    }
  }
}

TEST(Whitespace, PythonSplitSemantics) {
  const auto toks = text::split_whitespace("  a\tb c　d \n");
  ASSERT_EQ(toks.size(), 4u);
  EXPECT_EQ(toks[0], "a");
  EXPECT_EQ(toks[3], "d");
  EXPECT_EQ(text::count_tokens(""), 0u);
  EXPECT_EQ(text::count_tokens("a b"), 2u);
  EXPECT_EQ(text::count_tokens("a b c"), 3u);
  EXPECT_EQ(text::trim("\t x y  "), "x y");
}

TEST(Normalize, Modes) {
  EXPECT_EQ(text::normalize("  Hello   World ", Normalization::kExact), "  Hello   World ");
  EXPECT_EQ(text::normalize("  Hello   World ", Normalization::kCasefoldWs), "hello world");
  EXPECT_EQ(text::normalize("Straße", Normalization::kCasefoldWs), "strasse");
  EXPECT_EQ(text::normalize("नमस्ते  दुनिया",
                            Normalization::kCasefoldWs),
            "नमस्ते दुनिया");
}

TEST(Tokenizer, IntlSplitsPunctuationAndSymbols) {
  using metrics::tokenize_intl;
  EXPECT_EQ(tokenize_intl("Hello, world! 3.5 $10."), "Hello , world ! 3.5 $ 10.");
  EXPECT_EQ(tokenize_intl("नमस्ते।"), "नमस्ते ।");
  EXPECT_EQ(tokenize_intl("1,000"), "1,000");
  EXPECT_EQ(tokenize_intl("a  b"), "a b");
  EXPECT_EQ(metrics::tokenize("a,b", metrics::TokenizerKind::kWhitespace), "a,b");
}

TEST(SplitMix64, ReferenceSequence) {
  SplitMix64 g(0);
  EXPECT_EQ(g(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(g(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(g(), 0x06c45d188009454fULL);
}

TEST(SplitMix64, BelowIsInRangeAndRoughlyUniform) {
  SplitMix64 g(42);
  std::map<std::uint64_t, int> counts;
  for (int i = 0; i < 70000; ++i) {
    const auto v = g.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (const auto& [v, c] : counts) EXPECT_NEAR(c, 10000, 500) << v;
  EXPECT_EQ(g.below(1), 0u);
}

TEST(SplitMix64, SubstreamsAreIndependentOfOrder) {
  auto a = substream(9, 3);
  auto b = substream(9, 3);
  EXPECT_EQ(a(), b());
  EXPECT_NE(substream(9, 3)(), substream(9, 4)());
  EXPECT_NE(substream(9, 3)(), substream(10, 3)());
}

TEST(Shuffle, IsSeededPermutation) {
  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  SplitMix64 g1(5), g2(5), g3(6);
  shuffle(std::span<int>(v), g1);
  shuffle(std::span<int>(w), g2);
  EXPECT_EQ(v, w);
  auto x = std::vector<int>(100);
  std::iota(x.begin(), x.end(), 0);
  shuffle(std::span<int>(x), g3);
  EXPECT_NE(v, x);
  std::sort(v.begin(), v.end());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(v[i], i);
}

}  // namespace
}  // namespace anuvaad
