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

#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anuvaad/error.hpp"

namespace anuvaad::metrics {

/// A corpus metric that decomposes into additive per-sentence integer
/// statistics. Corpus scores, bootstrap resamples and paired tests all sum
/// rows of a StatsTable and call score() on the total.
template <typename M>
concept CorpusMetric = requires(const M& m, std::string_view ref, std::string_view hyp,
                                std::span<const std::int64_t> stats, std::span<std::int64_t> out) {
  { m.name() } -> std::convertible_to<std::string>;
  { m.stats_width() } -> std::convertible_to<std::size_t>;
  { m.sentence_stats(ref, hyp, out) };
  { m.score(stats) } -> std::convertible_to<double>;
  { M::kHigherIsBetter } -> std::convertible_to<bool>;
};

class StatsTable {
 public:
  StatsTable(std::size_t rows, std::size_t width) : rows_(rows), width_(width), data_(rows * width, 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t width() const noexcept { return width_; }
  std::span<std::int64_t> row(std::size_t i) noexcept { return {data_.data() + i * width_, width_}; }
  std::span<const std::int64_t> row(std::size_t i) const noexcept { return {data_.data() + i * width_, width_}; }

  std::vector<std::int64_t> total() const {
    std::vector<std::int64_t> sum(width_, 0);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t c = 0; c < width_; ++c) sum[c] += data_[i * width_ + c];
    }
    return sum;
  }

 private:
  std::size_t rows_;
  std::size_t width_;
  std::vector<std::int64_t> data_;
};

inline void check_same_length(std::size_t refs, std::size_t hyps) {
  if (refs != hyps) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(refs) + " references vs " + std::to_string(hyps) + " hypotheses");
  }
}

template <CorpusMetric M>
StatsTable sentence_stats(const M& metric, std::span<const std::string> refs, std::span<const std::string> hyps) {
  check_same_length(refs.size(), hyps.size());
  StatsTable table(refs.size(), metric.stats_width());
  for (std::size_t i = 0; i < refs.size(); ++i) metric.sentence_stats(refs[i], hyps[i], table.row(i));
  return table;
}

template <CorpusMetric M>
double corpus_score(const M& metric, std::span<const std::string> refs, std::span<const std::string> hyps) {
  const StatsTable table = sentence_stats(metric, refs, hyps);
  return metric.score(table.total());
}

}  // namespace anuvaad::metrics
