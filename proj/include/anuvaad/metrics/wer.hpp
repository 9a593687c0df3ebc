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
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "anuvaad/metrics/corpus_stats.hpp"
#include "anuvaad/text.hpp"

namespace anuvaad::metrics {

/// Levenshtein distance with unit substitution, insertion and deletion costs.
/// Two rolling rows, O(min-side) memory.
template <typename T>
std::size_t edit_distance(std::span<const T> ref, std::span<const T> hyp) {
  std::vector<std::size_t> prev(hyp.size() + 1), cur(hyp.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= hyp.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[hyp.size()];
}

/// Word error rate over whitespace tokens: total edits / total reference words.
class Wer {
 public:
  static constexpr bool kHigherIsBetter = false;

  std::string name() const { return "wer"; }

  /// [edits, ref_words]
  std::size_t stats_width() const noexcept { return 2; }

  void sentence_stats(std::string_view ref, std::string_view hyp, std::span<std::int64_t> out) const {
    const auto r = text::split_whitespace(ref);
    const auto h = text::split_whitespace(hyp);
    out[0] = static_cast<std::int64_t>(edit_distance<std::string_view>(r, h));
    out[1] = static_cast<std::int64_t>(r.size());
  }

  /// A resample with no reference words scores its raw edit count.
  double score(std::span<const std::int64_t> stats) const {
    const auto edits = static_cast<double>(stats[0]);
    return stats[1] > 0 ? edits / static_cast<double>(stats[1]) : edits;
  }
};

inline double wer(std::span<const std::string> refs, std::span<const std::string> hyps) {
  check_same_length(refs.size(), hyps.size());
  const Wer metric;
  const auto total = sentence_stats(metric, refs, hyps).total();
  if (total[1] == 0) throw Error(ErrorCode::kEmptyReferenceCorpus, "references contain no words");
  return metric.score(total);
}

}  // namespace anuvaad::metrics
