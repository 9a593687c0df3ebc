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

// Bootstrap confidence intervals and the paired bootstrap significance test.
//
// Resample r draws its n sentence indices from substream(seed, r) with
// SplitMix64::below(n), so results do not depend on the worker count and
// can be replayed outside this library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "anuvaad/error.hpp"
#include "anuvaad/metrics/corpus_stats.hpp"
#include "anuvaad/metrics/scoring.hpp"
#include "anuvaad/parallel.hpp"
#include "anuvaad/rng.hpp"

namespace anuvaad::metrics {

inline constexpr std::size_t kDefaultResamples = 1000;

/// Sentence indices of resample `r`.
inline std::vector<std::size_t> resample_indices(std::uint64_t seed, std::size_t r, std::size_t n) {
  SplitMix64 rng = substream(seed, r);
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
  return idx;
}

/// Linear-interpolation percentile of sorted data, q in [0, 1].
inline double percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::kInvalidArgument, "percentile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

namespace detail {

inline constexpr std::size_t kResampleChunk = 64;

// Scores every resample of each table with shared indices. Returns one score
// vector per table.
template <CorpusMetric M>
std::vector<std::vector<double>> resample_scores(const M& metric, std::span<const StatsTable* const> tables,
                                                 std::size_t n_resamples, std::uint64_t seed, unsigned workers) {
  const std::size_t n = tables.front()->rows();
  const std::size_t width = metric.stats_width();
  std::vector<std::vector<double>> scores(tables.size(), std::vector<double>(n_resamples));
  const std::size_t chunks = (n_resamples + kResampleChunk - 1) / kResampleChunk;
  anuvaad::detail::for_each_block(chunks, workers, [&](std::size_t c, unsigned) {
    std::vector<std::int64_t> sum(width);
    const std::size_t r1 = std::min(n_resamples, (c + 1) * kResampleChunk);
    for (std::size_t r = c * kResampleChunk; r < r1; ++r) {
      const auto idx = resample_indices(seed, r, n);
      for (std::size_t t = 0; t < tables.size(); ++t) {
        std::fill(sum.begin(), sum.end(), 0);
        for (std::size_t i : idx) {
          const auto row = tables[t]->row(i);
          for (std::size_t k = 0; k < width; ++k) sum[k] += row[k];
        }
        scores[t][r] = metric.score(sum);
      }
    }
  });
  return scores;
}

}  // namespace detail

/// Point score plus a 95% percentile bootstrap interval.
template <CorpusMetric M>
MetricReport bootstrap_ci(const M& metric, std::span<const std::string> refs, std::span<const std::string> hyps,
                          std::size_t n_resamples = kDefaultResamples, std::uint64_t seed = 0, unsigned workers = 1) {
  check_same_length(refs.size(), hyps.size());
  if (refs.size() < 2) throw Error(ErrorCode::kCorpusTooSmall, "bootstrap needs at least 2 sentences");
  const StatsTable table = sentence_stats(metric, refs, hyps);

  MetricReport report;
  report.metric = metric.name();
  report.value = metric.score(table.total());
  report.n_resamples = n_resamples;
  report.seed = seed;
  report.ci_low = report.ci_high = report.value;
  if (n_resamples == 0) return report;

  const StatsTable* tables[] = {&table};
  auto scores = std::move(detail::resample_scores(metric, tables, n_resamples, seed, workers).front());
  std::sort(scores.begin(), scores.end());
  report.ci_low = percentile(scores, 0.025);
  report.ci_high = percentile(scores, 0.975);
  return report;
}

/// One-sided paired bootstrap test of "system A scores better than system B".
/// Both systems are scored on the same resampled indices and
/// p = (1 + #{resamples where A is not better}) / (1 + n_resamples).
template <CorpusMetric M>
SignificanceResult paired_bootstrap_test(const M& metric, std::span<const std::string> refs,
                                         std::span<const std::string> hyps_a, std::span<const std::string> hyps_b,
                                         std::size_t n_resamples = kDefaultResamples, std::uint64_t seed = 0,
                                         unsigned workers = 1) {
  check_same_length(refs.size(), hyps_a.size());
  check_same_length(refs.size(), hyps_b.size());
  if (refs.size() < 2) throw Error(ErrorCode::kCorpusTooSmall, "paired bootstrap needs at least 2 sentences");
  const StatsTable a = sentence_stats(metric, refs, hyps_a);
  const StatsTable b = sentence_stats(metric, refs, hyps_b);

  SignificanceResult result;
  result.metric = metric.name();
  result.score_a = metric.score(a.total());
  result.score_b = metric.score(b.total());
  result.delta_observed = result.score_a - result.score_b;
  result.n_resamples = n_resamples;
  result.seed = seed;

  const StatsTable* tables[] = {&a, &b};
  const auto scores = detail::resample_scores(metric, tables, n_resamples, seed, workers);
  std::size_t not_better = 0;
  for (std::size_t r = 0; r < n_resamples; ++r) {
    const double sa = scores[0][r];
    const double sb = scores[1][r];
    if (M::kHigherIsBetter ? sa <= sb : sa >= sb) ++not_better;
  }
  result.p_value = static_cast<double>(1 + not_better) / static_cast<double>(1 + n_resamples);
  return result;
}

inline nlohmann::ordered_json to_json(const MetricReport& r, const ScoringConfig& cfg) {
  return {{"metric", r.metric},
          {"value", r.value},
          {"ci", {r.ci_low, r.ci_high}},
          {"n_resamples", r.n_resamples},
          {"seed", r.seed},
          {"config", to_json(cfg)}};
}

}  // namespace anuvaad::metrics
