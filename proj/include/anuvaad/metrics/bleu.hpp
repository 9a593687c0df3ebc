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

// Corpus BLEU with the reference toolkit's conventions: single reference,
// n-gram counts clipped by the reference, brevity penalty on the summed
// lengths, and mteval "exp" smoothing (the k-th zero-match order gets
// precision 100 / (2^k * total)).

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "anuvaad/metrics/corpus_stats.hpp"
#include "anuvaad/metrics/scoring.hpp"
#include "anuvaad/metrics/tokenizer.hpp"
#include "anuvaad/text.hpp"

namespace anuvaad::metrics {

class Bleu {
 public:
  static constexpr bool kHigherIsBetter = true;

  explicit Bleu(const ScoringConfig& cfg = {})
      : max_order_(static_cast<std::size_t>(cfg.bleu_max_order)), smoothing_(cfg.bleu_smoothing), tokenizer_(cfg.tokenizer) {
    cfg.validate();
  }

  std::string name() const { return "bleu"; }

  /// [hyp_len, ref_len, correct_1..N, total_1..N]
  std::size_t stats_width() const noexcept { return 2 + 2 * max_order_; }

  void sentence_stats(std::string_view ref, std::string_view hyp, std::span<std::int64_t> out) const {
    const std::string ref_tok = tokenize(ref, tokenizer_);
    const std::string hyp_tok = tokenize(hyp, tokenizer_);
    const auto ref_words = text::split_whitespace(ref_tok);
    const auto hyp_words = text::split_whitespace(hyp_tok);
    out[0] = static_cast<std::int64_t>(hyp_words.size());
    out[1] = static_cast<std::int64_t>(ref_words.size());
    for (std::size_t n = 1; n <= max_order_; ++n) {
      auto ref_counts = count_ngrams(ref_words, n);
      std::int64_t correct = 0;
      std::int64_t total = 0;
      for (const auto& [gram, count] : count_ngrams(hyp_words, n)) {
        total += count;
        if (auto it = ref_counts.find(gram); it != ref_counts.end()) correct += std::min(count, it->second);
      }
      out[1 + n] = correct;
      out[1 + max_order_ + n] = total;
    }
  }

  double score(std::span<const std::int64_t> stats) const {
    const auto sys_len = static_cast<double>(stats[0]);
    const auto ref_len = static_cast<double>(stats[1]);
    double bp = 1.0;
    if (sys_len < ref_len) bp = sys_len > 0 ? std::exp(1.0 - ref_len / sys_len) : 0.0;

    bool any_match = false;
    for (std::size_t n = 0; n < max_order_; ++n) any_match = any_match || stats[2 + n] != 0;
    if (!any_match) return 0.0;

    std::vector<double> precisions(max_order_, 0.0);
    double smooth = 1.0;
    for (std::size_t n = 0; n < max_order_; ++n) {
      const auto correct = stats[2 + n];
      const auto total = stats[2 + max_order_ + n];
      if (total == 0) break;
      if (correct == 0) {
        if (smoothing_ == Smoothing::kExponential) {
          smooth *= 2.0;
          precisions[n] = 100.0 / (smooth * static_cast<double>(total));
        }
      } else {
        precisions[n] = 100.0 * static_cast<double>(correct) / static_cast<double>(total);
      }
    }
    double log_sum = 0.0;
    for (double p : precisions) log_sum += p == 0.0 ? -9999999999.0 : std::log(p);
    return bp * std::exp(log_sum / static_cast<double>(max_order_));
  }

 private:
  using Counts = std::unordered_map<std::string, std::int64_t>;

  static Counts count_ngrams(const std::vector<std::string_view>& words, std::size_t n) {
    Counts counts;
    if (words.size() < n) return counts;
    std::string key;
    for (std::size_t i = 0; i + n <= words.size(); ++i) {
      key.clear();
      for (std::size_t k = 0; k < n; ++k) {
        if (k) key.push_back(' ');
        key.append(words[i + k]);
      }
      ++counts[key];
    }
    return counts;
  }

  std::size_t max_order_;
  Smoothing smoothing_;
  TokenizerKind tokenizer_;
};

inline double bleu(std::span<const std::string> refs, std::span<const std::string> hyps, const ScoringConfig& cfg = {}) {
  check_same_length(refs.size(), hyps.size());
  if (refs.empty()) throw Error(ErrorCode::kEmptyCorpus, "BLEU needs at least one sentence");
  return corpus_score(Bleu(cfg), refs, hyps);
}

}  // namespace anuvaad::metrics
