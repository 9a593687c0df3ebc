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

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anuvaad/error.hpp"
#include "anuvaad/metrics/unicode_tables.hpp"

namespace anuvaad::text {

namespace detail {

inline bool in_ranges(std::span<const unicode_tables::CodepointRange> ranges, char32_t cp) {
  auto it = std::upper_bound(ranges.begin(), ranges.end(), cp,
                             [](char32_t c, const auto& r) { return c < r.lo; });
  if (it == ranges.begin()) return false;
  --it;
  return cp <= it->hi;
}

}  // namespace detail

inline bool is_punctuation(char32_t cp) { return detail::in_ranges(unicode_tables::kPunctuation, cp); }
inline bool is_number(char32_t cp) { return detail::in_ranges(unicode_tables::kNumber, cp); }
inline bool is_symbol(char32_t cp) { return detail::in_ranges(unicode_tables::kSymbol, cp); }
inline bool is_space(char32_t cp) {
  if (cp < 0x80) return cp == ' ' || (cp >= 0x09 && cp <= 0x0D) || (cp >= 0x1C && cp <= 0x1F);
  return detail::in_ranges(unicode_tables::kWhitespace, cp);
}

/// Decodes one code point starting at `pos`, advancing it. Rejects overlong
/// forms, surrogates and out-of-range values.
inline char32_t decode_one(std::string_view s, std::size_t& pos) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  const unsigned char b0 = byte(pos);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  std::size_t len;
  char32_t cp;
  char32_t min;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, cp = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, cp = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, cp = b0 & 0x07, min = 0x10000;
  } else {
    throw Error(ErrorCode::kInvalidUtf8, "invalid lead byte", pos);
  }
  if (pos + len > s.size()) throw Error(ErrorCode::kInvalidUtf8, "truncated sequence", pos);
  for (std::size_t i = 1; i < len; ++i) {
    const unsigned char b = byte(pos + i);
    if ((b & 0xC0) != 0x80) throw Error(ErrorCode::kInvalidUtf8, "invalid continuation byte", pos);
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    throw Error(ErrorCode::kInvalidUtf8, "invalid code point", pos);
  }
  pos += len;
  return cp;
}

inline std::u32string decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t pos = 0; pos < s.size();) out.push_back(decode_one(s, pos));
  return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) append_utf8(out, cp);
  return out;
}

/// Splits on runs of Unicode whitespace, dropping empty pieces (the same
/// rule as Python's str.split() with no arguments). Views point into `s`.
inline std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> tokens;
  std::size_t start = std::string_view::npos;
  for (std::size_t pos = 0; pos < s.size();) {
    const std::size_t here = pos;
    const char32_t cp = decode_one(s, pos);
    if (is_space(cp)) {
      if (start != std::string_view::npos) {
        tokens.push_back(s.substr(start, here - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = here;
    }
  }
  if (start != std::string_view::npos) tokens.push_back(s.substr(start));
  return tokens;
}

inline std::size_t count_tokens(std::string_view s) { return split_whitespace(s).size(); }

inline std::string_view trim(std::string_view s) {
  const auto tokens = split_whitespace(s);
  if (tokens.empty()) return {};
  const char* begin = tokens.front().data();
  const char* end = tokens.back().data() + tokens.back().size();
  return {begin, static_cast<std::size_t>(end - begin)};
}

inline void append_casefolded(std::u32string& out, char32_t cp) {
  const auto& table = unicode_tables::kCaseFold;
  auto it = std::lower_bound(std::begin(table), std::end(table), cp,
                             [](const auto& e, char32_t c) { return e.cp < c; });
  if (it != std::end(table) && it->cp == cp) {
    out.append(it->to, it->len);
  } else {
    out.push_back(cp);
  }
}

inline std::string casefold(std::string_view s) {
  std::u32string folded;
  folded.reserve(s.size());
  for (std::size_t pos = 0; pos < s.size();) append_casefolded(folded, decode_one(s, pos));
  return encode(folded);
}

enum class Normalization { kExact, kCasefoldWs };

/// Comparison key for overlap checks. kExact is the identity; kCasefoldWs
/// folds case and collapses every whitespace run to one ASCII space, with
/// leading and trailing whitespace removed.
inline std::string normalize(std::string_view s, Normalization mode) {
  if (mode == Normalization::kExact) return std::string(s);
  std::string joined;
  joined.reserve(s.size());
  for (std::string_view tok : split_whitespace(s)) {
    if (!joined.empty()) joined.push_back(' ');
    joined.append(tok);
  }
  return casefold(joined);
}

}  // namespace anuvaad::text
