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

// Corpus chrF / chrF++ following the reference toolkit (v2 defaults):
// whitespace is removed before extracting character n-grams, statistics are
// summed over the corpus, and precision and recall are averaged over the
// orders where both sides have n-grams before forming F_beta.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "anuvaad/metrics/corpus_stats.hpp"
#include "anuvaad/metrics/scoring.hpp"
#include "anuvaad/text.hpp"

namespace anuvaad::metrics {

class Chrf {
 public:
  static constexpr bool kHigherIsBetter = true;

  explicit Chrf(const ScoringConfig& cfg = {})
      : char_order_(static_cast<std::size_t>(cfg.chrf_char_order)),
        word_order_(static_cast<std::size_t>(cfg.chrf_word_order)),
        beta_(cfg.chrf_beta) {
    cfg.validate();
  }

  std::string name() const {
    std::string n = "chrf";
    n += beta_ == static_cast<int>(beta_) ? std::to_string(static_cast<int>(beta_)) : std::to_string(beta_);
    n.append(word_order_, '+');
    return n;
  }

  /// [hyp, ref, match] per order: char orders 1..C, then word orders 1..W.
  std::size_t stats_width() const noexcept { return 3 * (char_order_ + word_order_); }

  void sentence_stats(std::string_view ref, std::string_view hyp, std::span<std::int64_t> out) const {
    const std::u32string hyp_chars = strip_spaces(text::decode(hyp));
    const std::u32string ref_chars = strip_spaces(text::decode(ref));
    std::size_t slot = 0;
    for (std::size_t n = 1; n <= char_order_; ++n, ++slot) {
      match_stats(count_char_ngrams(hyp_chars, n), count_char_ngrams(ref_chars, n), out.subspan(3 * slot, 3));
    }
    if (word_order_ > 0) {
      const auto hyp_words = split_punctuation(hyp);
      const auto ref_words = split_punctuation(ref);
      for (std::size_t n = 1; n <= word_order_; ++n, ++slot) {
        match_stats(count_word_ngrams(hyp_words, n), count_word_ngrams(ref_words, n), out.subspan(3 * slot, 3));
      }
    }
  }

  double score(std::span<const std::int64_t> stats) const {
    constexpr double kEps = 1e-16;
    const double factor = beta_ * beta_;
    double avg_prec = 0.0;
    double avg_rec = 0.0;
    std::size_t effective_order = 0;
    for (std::size_t i = 0; i < char_order_ + word_order_; ++i) {
      const auto n_hyp = stats[3 * i];
      const auto n_ref = stats[3 * i + 1];
      const auto n_match = stats[3 * i + 2];
      const double prec = n_hyp > 0 ? static_cast<double>(n_match) / static_cast<double>(n_hyp) : kEps;
      const double rec = n_ref > 0 ? static_cast<double>(n_match) / static_cast<double>(n_ref) : kEps;
      if (n_hyp > 0 && n_ref > 0) {
        avg_prec += prec;
        avg_rec += rec;
        ++effective_order;
      }
    }
    if (effective_order == 0) {
      avg_prec = avg_rec = 0.0;
    } else {
      avg_prec /= static_cast<double>(effective_order);
      avg_rec /= static_cast<double>(effective_order);
    }
    if (avg_prec + avg_rec == 0.0) return 0.0;
    double score = (1 + factor) * avg_prec * avg_rec;
    score /= (factor * avg_prec) + avg_rec;
    return 100 * score;
  }

 private:
  template <typename Key>
  using Counts = std::unordered_map<Key, std::int64_t>;

  static std::u32string strip_spaces(std::u32string s) {
    std::erase_if(s, [](char32_t c) { return text::is_space(c); });
    return s;
  }

  static Counts<std::u32string_view> count_char_ngrams(const std::u32string& s, std::size_t n) {
    Counts<std::u32string_view> counts;
    const std::u32string_view v(s);
    for (std::size_t i = 0; i + n <= v.size(); ++i) ++counts[v.substr(i, n)];
    return counts;
  }

  static Counts<std::string> count_word_ngrams(const std::vector<std::string>& words, std::size_t n) {
    Counts<std::string> counts;
    for (std::size_t i = 0; i + n <= words.size(); ++i) {
      std::string key;
      for (std::size_t k = 0; k < n; ++k) {
        if (k) key.push_back(' ');
        key += words[i + k];
      }
      ++counts[key];
    }
    return counts;
  }

  // Detaches one ASCII punctuation mark from the end (or else the start) of
  // each whitespace token, for the word n-grams of chrF++.
  static std::vector<std::string> split_punctuation(std::string_view sent) {
    static constexpr std::string_view kPuncts = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
    const auto is_punct = [](char32_t c) { return c < 0x80 && kPuncts.find(static_cast<char>(c)) != std::string_view::npos; };
    std::vector<std::string> out;
    for (std::string_view w : text::split_whitespace(sent)) {
      const std::u32string cps = text::decode(w);
      if (cps.size() == 1) {
        out.emplace_back(w);
      } else if (is_punct(cps.back())) {
        out.push_back(text::encode(std::u32string_view(cps).substr(0, cps.size() - 1)));
        out.push_back(text::encode(std::u32string_view(cps).substr(cps.size() - 1)));
      } else if (is_punct(cps.front())) {
        out.push_back(text::encode(std::u32string_view(cps).substr(0, 1)));
        out.push_back(text::encode(std::u32string_view(cps).substr(1)));
      } else {
        out.emplace_back(w);
      }
    }
    return out;
  }

  template <typename Map>
  static void match_stats(const Map& hyp, const Map& ref, std::span<std::int64_t> out) {
    std::int64_t hyp_count = 0;
    std::int64_t match = 0;
    for (const auto& [gram, count] : hyp) {
      hyp_count += count;
      if (auto it = ref.find(gram); it != ref.end()) match += std::min(count, it->second);
    }
    std::int64_t ref_count = 0;
    for (const auto& [gram, count] : ref) ref_count += count;
    out[0] = ref.empty() ? 0 : hyp_count;
    out[1] = ref_count;
    out[2] = match;
  }

  std::size_t char_order_;
  std::size_t word_order_;
  double beta_;
};

inline double chrf(std::span<const std::string> refs, std::span<const std::string> hyps, const ScoringConfig& cfg = {}) {
  check_same_length(refs.size(), hyps.size());
  if (refs.empty()) throw Error(ErrorCode::kEmptyCorpus, "chrF needs at least one sentence");
  return corpus_score(Chrf(cfg), refs, hyps);
}

}  // namespace anuvaad::metrics
