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

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "anuvaad/error.hpp"

namespace anuvaad::metrics {

enum class Smoothing { kNone, kExponential };
enum class TokenizerKind { kIntl, kWhitespace };

inline std::string_view to_string(Smoothing s) { return s == Smoothing::kNone ? "none" : "exponential"; }
inline std::string_view to_string(TokenizerKind t) { return t == TokenizerKind::kIntl ? "intl" : "whitespace"; }

inline Smoothing parse_smoothing(std::string_view s) {
  if (s == "none") return Smoothing::kNone;
  if (s == "exponential" || s == "exp") return Smoothing::kExponential;
  throw Error(ErrorCode::kInvalidArgument, "unknown BLEU smoothing '" + std::string(s) + "'");
}

inline TokenizerKind parse_tokenizer(std::string_view s) {
  if (s == "intl") return TokenizerKind::kIntl;
  if (s == "whitespace" || s == "none") return TokenizerKind::kWhitespace;
  throw Error(ErrorCode::kInvalidArgument, "unknown tokenizer '" + std::string(s) + "'");
}

/// Metric settings. The defaults reproduce the reference toolkit's
/// `BLEU(tokenize="intl")` and `CHRF()`.
struct ScoringConfig {
  int bleu_max_order = 4;
  Smoothing bleu_smoothing = Smoothing::kExponential;
  TokenizerKind tokenizer = TokenizerKind::kIntl;
  int chrf_char_order = 6;
  double chrf_beta = 2.0;
  int chrf_word_order = 0;

  void validate() const {
    if (bleu_max_order < 1) throw Error(ErrorCode::kInvalidArgument, "bleu_max_order must be >= 1");
    if (chrf_char_order < 1) throw Error(ErrorCode::kInvalidArgument, "chrf_char_order must be >= 1");
    if (chrf_word_order < 0) throw Error(ErrorCode::kInvalidArgument, "chrf_word_order must be >= 0");
    if (!(chrf_beta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "chrf_beta must be > 0");
  }
};

inline nlohmann::ordered_json to_json(const ScoringConfig& c) {
  return {{"bleu_max_order", c.bleu_max_order},   {"bleu_smoothing", to_string(c.bleu_smoothing)},
          {"tokenizer", to_string(c.tokenizer)},  {"chrf_char_order", c.chrf_char_order},
          {"chrf_beta", c.chrf_beta},             {"chrf_word_order", c.chrf_word_order}};
}

struct MetricReport {
  std::string metric;
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_resamples = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

struct SignificanceResult {
  std::string metric;
  double score_a = 0.0;
  double score_b = 0.0;
  double delta_observed = 0.0;  // score_a - score_b
  double p_value = 1.0;
  std::size_t n_resamples = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const SignificanceResult&, const SignificanceResult&) = default;
};

}  // namespace anuvaad::metrics
