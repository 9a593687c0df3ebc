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

// Dataset assembly from scored pairs: dev/test partition, nested training
// tiers, the ASR pre-training pool, overlap checks and reporting.
//
// Boundary convention: training tiers are half-open, [lower_bound, train_max),
// and a pair scoring exactly devtest_min goes to dev/test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "anuvaad/corpus.hpp"
#include "anuvaad/error.hpp"
#include "anuvaad/miner.hpp"
#include "anuvaad/rng.hpp"
#include "anuvaad/text.hpp"

namespace anuvaad {

struct TrainBin {
  std::string name;
  double lower_bound = 0.0;
};

struct SplitSpec {
  double devtest_min = 0.8;
  std::vector<TrainBin> train_bins = {{"S1", 0.5}, {"S2", 0.6}, {"S3", 0.62}, {"S4", 0.68}, {"S5", 0.7}};
  double train_max = 0.8;
  std::uint64_t rng_seed = 0;

  void validate() const {
    const auto fail = [](const std::string& why) { return Error(ErrorCode::kInvalidSpec, why); };
    if (!(devtest_min > 0.0 && devtest_min <= 1.0)) throw fail("devtest_min must lie in (0, 1]");
    if (train_max != devtest_min) throw fail("train_max must equal devtest_min");
    if (train_bins.empty()) throw fail("at least one training bin is required");
    std::set<std::string> names;
    for (std::size_t i = 0; i < train_bins.size(); ++i) {
      const auto& bin = train_bins[i];
      if (bin.name.empty()) throw fail("training bin names must be non-empty");
      if (bin.name == "dev" || bin.name == "test" || bin.name == "discarded") {
        throw fail("training bin name '" + bin.name + "' is reserved");
      }
      if (!names.insert(bin.name).second) throw fail("duplicate training bin '" + bin.name + "'");
      if (!std::isfinite(bin.lower_bound) || !(bin.lower_bound < devtest_min)) {
        throw fail("bin " + bin.name + " lower bound must be below devtest_min");
      }
      if (i > 0 && !(bin.lower_bound > train_bins[i - 1].lower_bound)) {
        throw fail("training bin lower bounds must be strictly increasing");
      }
    }
  }
};

struct AsrPool {
  std::vector<std::size_t> src;  // row indices into the source corpus
  std::vector<std::size_t> tgt;  // row indices into the target corpus
};

struct SplitAssignment {
  std::vector<MinedPair> dev;
  std::vector<MinedPair> test;
  std::vector<std::pair<std::string, std::vector<MinedPair>>> train;  // in SplitSpec order
  std::vector<MinedPair> discarded;
  std::vector<MinedPair> leaked;  // training pairs dropped for sharing text with dev/test
  AsrPool asr_pool;

  const std::vector<MinedPair>& tier(std::string_view name) const {
    for (const auto& [n, pairs] : train) {
      if (n == name) return pairs;
    }
    throw Error(ErrorCode::kInvalidArgument, "no training tier '" + std::string(name) + "'");
  }

  /// dev, test, then training tiers: the splits written as manifests.
  std::vector<std::pair<std::string, const std::vector<MinedPair>*>> named_splits() const {
    std::vector<std::pair<std::string, const std::vector<MinedPair>*>> out{{"dev", &dev}, {"test", &test}};
    for (const auto& [n, pairs] : train) out.emplace_back(n, &pairs);
    return out;
  }
};

namespace detail {

inline bool by_index(const MinedPair& a, const MinedPair& b) {
  return a.src_idx != b.src_idx ? a.src_idx < b.src_idx : a.tgt_idx < b.tgt_idx;
}

}  // namespace detail

/// Buckets scored pairs. High-scoring pairs are put in index order, shuffled
/// with `spec.rng_seed` and dealt alternately to dev and test (dev first, so it
/// takes the extra pair on odd counts). Every output list is sorted by
/// (src_idx, tgt_idx).
inline SplitAssignment assign_splits(std::span<const MinedPair> pairs, const SplitSpec& spec) {
  spec.validate();
  SplitAssignment out;
  for (const auto& bin : spec.train_bins) out.train.emplace_back(bin.name, std::vector<MinedPair>{});

  std::vector<MinedPair> high;
  for (const MinedPair& p : pairs) {
    if (p.score >= spec.devtest_min) {
      high.push_back(p);
    } else if (p.score >= spec.train_bins.front().lower_bound && p.score < spec.train_max) {
      for (std::size_t b = 0; b < spec.train_bins.size(); ++b) {
        if (p.score >= spec.train_bins[b].lower_bound) out.train[b].second.push_back(p);
      }
    } else {
      out.discarded.push_back(p);
    }
  }

  std::sort(high.begin(), high.end(), detail::by_index);
  SplitMix64 rng(spec.rng_seed);
  shuffle(std::span<MinedPair>(high), rng);
  for (std::size_t i = 0; i < high.size(); ++i) (i % 2 == 0 ? out.dev : out.test).push_back(high[i]);

  std::sort(out.dev.begin(), out.dev.end(), detail::by_index);
  std::sort(out.test.begin(), out.test.end(), detail::by_index);
  for (auto& [name, tier] : out.train) std::sort(tier.begin(), tier.end(), detail::by_index);
  std::sort(out.discarded.begin(), out.discarded.end(), detail::by_index);
  return out;
}

// ---------------------------------------------------------------------------
// Overlap checks

struct TextItem {
  std::string id;
  std::string text;
};

struct Violation {
  std::string text;
  std::string pool_id;
  std::string devtest_id;

  friend bool operator==(const Violation&, const Violation&) = default;
};

inline std::string_view to_string(text::Normalization n) {
  return n == text::Normalization::kExact ? "exact" : "casefold_ws";
}

inline text::Normalization parse_normalization(std::string_view s) {
  if (s == "exact") return text::Normalization::kExact;
  if (s == "casefold_ws") return text::Normalization::kCasefoldWs;
  throw Error(ErrorCode::kInvalidArgument, "unknown normalization '" + std::string(s) + "'");
}

/// Every (pool item, dev/test item) pair whose texts agree under
/// `normalization`, in pool order then dev/test order.
inline std::vector<Violation> check_contamination(std::span<const TextItem> pool, std::span<const TextItem> devtest,
                                                  text::Normalization normalization) {
  std::unordered_map<std::string, std::vector<std::size_t>> index;
  for (std::size_t i = 0; i < devtest.size(); ++i) {
    index[text::normalize(devtest[i].text, normalization)].push_back(i);
  }
  std::vector<Violation> out;
  for (const TextItem& item : pool) {
    auto it = index.find(text::normalize(item.text, normalization));
    if (it == index.end()) continue;
    for (std::size_t i : it->second) out.push_back({item.text, item.id, devtest[i].id});
  }
  return out;
}

namespace detail {

inline void check_pair_indices(std::span<const MinedPair> pairs, const Corpus& src, const Corpus& tgt) {
  for (const auto& p : pairs) {
    if (p.src_idx >= src.size() || p.tgt_idx >= tgt.size()) {
      throw Error(ErrorCode::kDanglingIndex, "pair (" + std::to_string(p.src_idx) + ", " + std::to_string(p.tgt_idx) +
                                                 ") out of range for corpora of size " + std::to_string(src.size()) +
                                                 " and " + std::to_string(tgt.size()));
    }
  }
}

inline std::unordered_set<std::string> devtest_keys(const SplitAssignment& a, const Corpus& src, const Corpus& tgt,
                                                    text::Normalization normalization) {
  std::unordered_set<std::string> keys;
  for (const auto* split : {&a.dev, &a.test}) {
    for (const auto& p : *split) {
      keys.insert(text::normalize(src.records[p.src_idx].text, normalization));
      keys.insert(text::normalize(tgt.records[p.tgt_idx].text, normalization));
    }
  }
  return keys;
}

}  // namespace detail

/// Drops from every training tier the pairs whose source or target text
/// matches a dev/test sentence; they are kept in `leaked`. Removal applies to
/// all tiers at once, so nestedness is preserved.
inline void dedup_training(SplitAssignment& a, const Corpus& src, const Corpus& tgt,
                           text::Normalization normalization) {
  detail::check_pair_indices(a.dev, src, tgt);
  detail::check_pair_indices(a.test, src, tgt);
  const auto keys = detail::devtest_keys(a, src, tgt, normalization);
  const auto leaks = [&](const MinedPair& p) {
    return keys.contains(text::normalize(src.records[p.src_idx].text, normalization)) ||
           keys.contains(text::normalize(tgt.records[p.tgt_idx].text, normalization));
  };
  for (auto& [name, tier] : a.train) {
    detail::check_pair_indices(tier, src, tgt);
    std::vector<MinedPair> kept;
    for (const auto& p : tier) {
      if (!leaks(p)) {
        kept.push_back(p);
      } else if (&tier == &a.train.front().second) {
        a.leaked.push_back(p);
      }
    }
    tier = std::move(kept);
  }
}

/// Utterances for ASR pre-training: everything outside dev/test (mid-score
/// pairs, low-score pairs and unmined utterances), minus any utterance whose
/// text matches a dev/test sentence under `normalization`.
inline AsrPool build_asr_pool(const SplitAssignment& a, const Corpus& src, const Corpus& tgt,
                              text::Normalization normalization = text::Normalization::kCasefoldWs) {
  detail::check_pair_indices(a.dev, src, tgt);
  detail::check_pair_indices(a.test, src, tgt);
  std::vector<bool> src_held(src.size(), false), tgt_held(tgt.size(), false);
  for (const auto* split : {&a.dev, &a.test}) {
    for (const auto& p : *split) {
      src_held[p.src_idx] = true;
      tgt_held[p.tgt_idx] = true;
    }
  }
  const auto keys = detail::devtest_keys(a, src, tgt, normalization);
  AsrPool pool;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!src_held[i] && !keys.contains(text::normalize(src.records[i].text, normalization))) pool.src.push_back(i);
  }
  for (std::size_t i = 0; i < tgt.size(); ++i) {
    if (!tgt_held[i] && !keys.contains(text::normalize(tgt.records[i].text, normalization))) pool.tgt.push_back(i);
  }
  return pool;
}

/// assign_splits, then training dedup (when requested) and the ASR pool.
inline SplitAssignment build_dataset(std::span<const MinedPair> pairs, const Corpus& src, const Corpus& tgt,
                                     const SplitSpec& spec, text::Normalization normalization,
                                     bool dedup_train = true) {
  detail::check_pair_indices(pairs, src, tgt);
  SplitAssignment a = assign_splits(pairs, spec);
  if (dedup_train) dedup_training(a, src, tgt, normalization);
  a.asr_pool = build_asr_pool(a, src, tgt, normalization);
  return a;
}

/// Pool and dev/test texts of an assignment, as fed to check_contamination.
inline std::pair<std::vector<TextItem>, std::vector<TextItem>> contamination_inputs(const SplitAssignment& a,
                                                                                   const Corpus& src,
                                                                                   const Corpus& tgt) {
  std::vector<TextItem> pool, devtest;
  for (auto i : a.asr_pool.src) pool.push_back({src.records[i].id, src.records[i].text});
  for (auto i : a.asr_pool.tgt) pool.push_back({tgt.records[i].id, tgt.records[i].text});
  for (const auto* split : {&a.dev, &a.test}) {
    for (const auto& p : *split) {
      devtest.push_back({src.records[p.src_idx].id, src.records[p.src_idx].text});
      devtest.push_back({tgt.records[p.tgt_idx].id, tgt.records[p.tgt_idx].text});
    }
  }
  return {std::move(pool), std::move(devtest)};
}

// ---------------------------------------------------------------------------
// Statistics

struct SideStats {
  double hours = 0.0;
  double mean_tokens = 0.0;
};

struct SplitStat {
  std::string name;
  std::size_t pairs = 0;
  SideStats src;
  SideStats tgt;
  bool mean_defined = false;  // false for an empty split; means are then 0
};

struct PoolStat {
  std::string lang;
  std::size_t utterances = 0;
  double hours = 0.0;
};

struct SplitStats {
  std::string src_lang;
  std::string tgt_lang;
  std::vector<SplitStat> splits;
  std::vector<PoolStat> pool;
};

inline SplitStat split_stat(std::string name, std::span<const MinedPair> pairs, const Corpus& src, const Corpus& tgt) {
  detail::check_pair_indices(pairs, src, tgt);
  SplitStat s;
  s.name = std::move(name);
  s.pairs = pairs.size();
  double src_seconds = 0.0, tgt_seconds = 0.0;
  std::size_t src_tokens = 0, tgt_tokens = 0;
  for (const auto& p : pairs) {
    const auto& a = src.records[p.src_idx];
    const auto& b = tgt.records[p.tgt_idx];
    src_seconds += a.duration_s;
    tgt_seconds += b.duration_s;
    src_tokens += text::count_tokens(a.text);
    tgt_tokens += text::count_tokens(b.text);
  }
  s.src.hours = src_seconds / 3600.0;
  s.tgt.hours = tgt_seconds / 3600.0;
  if (!pairs.empty()) {
    s.mean_defined = true;
    s.src.mean_tokens = static_cast<double>(src_tokens) / static_cast<double>(pairs.size());
    s.tgt.mean_tokens = static_cast<double>(tgt_tokens) / static_cast<double>(pairs.size());
  }
  return s;
}

inline SplitStats compute_stats(const SplitAssignment& a, const Corpus& src, const Corpus& tgt) {
  SplitStats stats;
  stats.src_lang = src.lang;
  stats.tgt_lang = tgt.lang;
  for (const auto& [name, pairs] : a.named_splits()) stats.splits.push_back(split_stat(name, *pairs, src, tgt));

  const auto pool_stat = [](const Corpus& c, std::span<const std::size_t> rows) {
    PoolStat p;
    p.lang = c.lang;
    p.utterances = rows.size();
    double seconds = 0.0;
    for (auto i : rows) {
      if (i >= c.size()) throw Error(ErrorCode::kDanglingIndex, "pool row " + std::to_string(i) + " out of range");
      seconds += c.records[i].duration_s;
    }
    p.hours = seconds / 3600.0;
    return p;
  };
  stats.pool.push_back(pool_stat(src, a.asr_pool.src));
  stats.pool.push_back(pool_stat(tgt, a.asr_pool.tgt));
  return stats;
}

/// Compact "count (hours)" cell: 52k (78), 8.8k (12), 950 (1.3).
inline std::string compact_cell(std::size_t count, double hours) {
  char c[32], h[32];
  if (count >= 10000) {
    std::snprintf(c, sizeof c, "%.0fk", static_cast<double>(count) / 1000.0);
  } else if (count >= 1000) {
    std::snprintf(c, sizeof c, "%.1fk", static_cast<double>(count) / 1000.0);
  } else {
    std::snprintf(c, sizeof c, "%zu", count);
  }
  std::snprintf(h, sizeof h, hours >= 10.0 ? "%.0f" : "%.1f", hours);
  return std::string(c) + " (" + h + ")";
}

inline std::string render_stats_table(const SplitStats& stats) {
  std::ostringstream out;
  char line[256];
  out << "Language pair " << stats.src_lang << "-" << stats.tgt_lang << "\n";
  std::snprintf(line, sizeof line, "%-10s %10s %14s %10s %10s %9s %9s\n", "split", "pairs", "compact", "hours_src",
                "hours_tgt", "len_src", "len_tgt");
  out << line;
  for (const auto& s : stats.splits) {
    std::snprintf(line, sizeof line, "%-10s %10zu %14s %10.3f %10.3f %9.2f %9.2f%s\n", s.name.c_str(), s.pairs,
                  compact_cell(s.pairs, s.src.hours).c_str(), s.src.hours, s.tgt.hours, s.src.mean_tokens,
                  s.tgt.mean_tokens, s.mean_defined ? "" : "  (empty)");
    out << line;
  }
  out << "\nASR pre-training pool\n";
  std::snprintf(line, sizeof line, "%-10s %12s %10s\n", "lang", "utterances", "hours");
  out << line;
  for (const auto& p : stats.pool) {
    std::snprintf(line, sizeof line, "%-10s %12zu %10.3f\n", p.lang.c_str(), p.utterances, p.hours);
    out << line;
  }
  return out.str();
}

inline nlohmann::ordered_json to_json(const SplitStats& stats) {
  nlohmann::ordered_json j;
  j["src_lang"] = stats.src_lang;
  j["tgt_lang"] = stats.tgt_lang;
  auto& splits = j["splits"] = nlohmann::ordered_json::array();
  for (const auto& s : stats.splits) {
    splits.push_back({{"name", s.name},
                      {"pairs", s.pairs},
                      {"hours_src", s.src.hours},
                      {"hours_tgt", s.tgt.hours},
                      {"mean_tokens_src", s.src.mean_tokens},
                      {"mean_tokens_tgt", s.tgt.mean_tokens},
                      {"mean_defined", s.mean_defined}});
  }
  auto& pool = j["asr_pool"] = nlohmann::ordered_json::array();
  for (const auto& p : stats.pool) pool.push_back({{"lang", p.lang}, {"utterances", p.utterances}, {"hours", p.hours}});
  return j;
}

// ---------------------------------------------------------------------------
// Length bias

struct LengthSummary {
  double mean = 0.0;
  double stdev = 0.0;  // population
  bool flagged = false;
};

struct SplitLengths {
  std::string name;
  std::size_t pairs = 0;
  LengthSummary src;
  LengthSummary tgt;
};

struct LengthBiasReport {
  double tolerance = 0.2;
  double reference_mean_src = 0.0;  // unweighted mean of the non-empty split means
  double reference_mean_tgt = 0.0;
  double max_gap_src = 0.0;  // largest |mean_a - mean_b| over split pairs
  double max_gap_tgt = 0.0;
  std::vector<SplitLengths> splits;  // empty splits are omitted

  std::vector<std::string> flagged() const {
    std::vector<std::string> out;
    for (const auto& s : splits) {
      if (s.src.flagged || s.tgt.flagged) out.push_back(s.name);
    }
    return out;
  }
};

/// Per-split token-length summaries. A split is flagged on a side when its
/// mean deviates from the reference mean by more than `tolerance` (relative).
inline LengthBiasReport length_bias_report(const SplitAssignment& a, const Corpus& src, const Corpus& tgt,
                                           double tolerance = 0.2) {
  if (!(tolerance >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be >= 0");
  LengthBiasReport report;
  report.tolerance = tolerance;

  const auto summarize = [](const std::vector<double>& xs) {
    LengthSummary s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    double sq = 0.0;
    for (double x : xs) sq += (x - s.mean) * (x - s.mean);
    s.stdev = std::sqrt(sq / static_cast<double>(xs.size()));
    return s;
  };

  for (const auto& [name, pairs] : a.named_splits()) {
    if (pairs->empty()) continue;
    detail::check_pair_indices(*pairs, src, tgt);
    std::vector<double> ls, lt;
    for (const auto& p : *pairs) {
      ls.push_back(static_cast<double>(text::count_tokens(src.records[p.src_idx].text)));
      lt.push_back(static_cast<double>(text::count_tokens(tgt.records[p.tgt_idx].text)));
    }
    report.splits.push_back({name, pairs->size(), summarize(ls), summarize(lt)});
  }
  if (report.splits.empty()) return report;

  for (const auto& s : report.splits) {
    report.reference_mean_src += s.src.mean;
    report.reference_mean_tgt += s.tgt.mean;
  }
  report.reference_mean_src /= static_cast<double>(report.splits.size());
  report.reference_mean_tgt /= static_cast<double>(report.splits.size());

  const auto deviates = [tolerance](double mean, double ref) {
    if (ref == 0.0) return mean != 0.0;
    return std::abs(mean - ref) / ref > tolerance;
  };
  for (auto& s : report.splits) {
    s.src.flagged = deviates(s.src.mean, report.reference_mean_src);
    s.tgt.flagged = deviates(s.tgt.mean, report.reference_mean_tgt);
  }
  for (std::size_t i = 0; i < report.splits.size(); ++i) {
    for (std::size_t j = i + 1; j < report.splits.size(); ++j) {
      report.max_gap_src = std::max(report.max_gap_src, std::abs(report.splits[i].src.mean - report.splits[j].src.mean));
      report.max_gap_tgt = std::max(report.max_gap_tgt, std::abs(report.splits[i].tgt.mean - report.splits[j].tgt.mean));
    }
  }
  return report;
}

inline nlohmann::ordered_json to_json(const LengthBiasReport& r) {
  nlohmann::ordered_json j;
  j["tolerance"] = r.tolerance;
  j["reference_mean_src"] = r.reference_mean_src;
  j["reference_mean_tgt"] = r.reference_mean_tgt;
  j["max_gap_src"] = r.max_gap_src;
  j["max_gap_tgt"] = r.max_gap_tgt;
  auto& splits = j["splits"] = nlohmann::ordered_json::array();
  for (const auto& s : r.splits) {
    splits.push_back({{"name", s.name},
                      {"pairs", s.pairs},
                      {"mean_src", s.src.mean},
                      {"stdev_src", s.src.stdev},
                      {"flagged_src", s.src.flagged},
                      {"mean_tgt", s.tgt.mean},
                      {"stdev_tgt", s.tgt.stdev},
                      {"flagged_tgt", s.tgt.flagged}});
  }
  j["flagged"] = r.flagged();
  return j;
}

}  // namespace anuvaad
