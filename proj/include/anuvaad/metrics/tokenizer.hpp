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

#pragma once

// Tokenizers for BLEU. `intl` mirrors the international mteval-v14 rules as
// implemented by the reference toolkit:
//
//   1. (\P{N})(\p{P})  ->  "$1 $2 "
//   2. (\p{P})(\P{N})  ->  " $1 $2"
//   3. (\p{S})         ->  " $1 "
//
// each applied as a left-to-right, non-overlapping substitution over the
// output of the previous rule, then whitespace is collapsed. A period between
// digits stays attached ("3.5"), and so does a sentence-final period after a
// digit, as in the original script.

#include <string>
#include <string_view>

#include "anuvaad/metrics/scoring.hpp"
#include "anuvaad/text.hpp"

namespace anuvaad::metrics {

namespace detail {

inline std::u32string rstrip(std::u32string s) {
  while (!s.empty() && text::is_space(s.back())) s.pop_back();
  return s;
}

template <typename Match>
std::u32string substitute_pairs(const std::u32string& in, Match&& match, bool space_before) {
  std::u32string out;
  out.reserve(in.size() + in.size() / 2);
  std::size_t i = 0;
  while (i < in.size()) {
    if (i + 1 < in.size() && match(in[i], in[i + 1])) {
      if (space_before) out.push_back(U' ');
      out.push_back(in[i]);
      out.push_back(U' ');
      out.push_back(in[i + 1]);
      if (!space_before) out.push_back(U' ');
      i += 2;
    } else {
      out.push_back(in[i]);
      ++i;
    }
  }
  return out;
}

inline std::string join_tokens(std::u32string_view s) {
  std::string out;
  bool pending_space = false;
  for (char32_t cp : s) {
    if (text::is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    text::append_utf8(out, cp);
  }
  return out;
}

}  // namespace detail

inline std::string tokenize_intl(std::string_view line) {
  std::u32string s = detail::rstrip(text::decode(line));
  s = detail::substitute_pairs(
      s, [](char32_t a, char32_t b) { return !text::is_number(a) && text::is_punctuation(b); },
      /*space_before=*/false);
  s = detail::substitute_pairs(
      s, [](char32_t a, char32_t b) { return text::is_punctuation(a) && !text::is_number(b); },
      /*space_before=*/true);
  std::u32string out;
  out.reserve(s.size() + 8);
  for (char32_t cp : s) {
    if (text::is_symbol(cp)) {
      out.push_back(U' ');
      out.push_back(cp);
      out.push_back(U' ');
    } else {
      out.push_back(cp);
    }
  }
  return detail::join_tokens(out);
}

/// Tokens of `line` under `kind`, joined by single spaces.
inline std::string tokenize(std::string_view line, TokenizerKind kind) {
  if (kind == TokenizerKind::kIntl) return tokenize_intl(line);
  return detail::join_tokens(text::decode(line));
}

}  // namespace anuvaad::metrics
