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

// Pipeline configuration: one JSON document, paths relative to its location.
//
//   {
//     "seed": 13,
//     "output_dir": "out",
//     "corpora": {"hi": {"corpus": "hi.jsonl", "embeddings": "hi.emb"}, ...},
//     "pairs": ["bn-hi"],
//     "mining": {"policy": "mutual_best", "min_score": 0.0, "block_size": 256,
//                "workers": 0, "histogram_edges": [0.5, 0.55, ...]},
//     "split": {"devtest_min": 0.8, "train_max": 0.8,
//               "train_bins": [{"name": "S1", "min": 0.5}, ...],
//               "normalization": "casefold_ws", "check_normalization": "casefold_ws",
//               "dedup_train": true, "length_tolerance": 0.2},
//     "scoring": {"bleu_max_order": 4, "bleu_smoothing": "exponential",
//                 "tokenizer": "intl", "chrf_char_order": 6, "chrf_beta": 2.0,
//                 "chrf_word_order": 0, "n_resamples": 1000}
//   }
//
// Every section and key is optional except "corpora" and "pairs" for the
// corpus stages.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "anuvaad/error.hpp"
#include "anuvaad/hash.hpp"
#include "anuvaad/metrics/scoring.hpp"
#include "anuvaad/miner.hpp"
#include "anuvaad/splits.hpp"

namespace anuvaad::pipeline {

struct LangPair {
  std::string src;
  std::string tgt;

  std::string label() const { return src + "-" + tgt; }
  friend bool operator==(const LangPair&, const LangPair&) = default;
};

inline LangPair parse_pair(std::string_view s) {
  const auto dash = s.find('-');
  if (dash == std::string_view::npos || dash == 0 || dash + 1 == s.size() || s.find('-', dash + 1) != std::string_view::npos) {
    throw Error(ErrorCode::kInvalidConfig, "language pair must look like SRC-TGT, got '" + std::string(s) + "'");
  }
  return {std::string(s.substr(0, dash)), std::string(s.substr(dash + 1))};
}

struct CorpusPaths {
  std::filesystem::path corpus;
  std::filesystem::path embeddings;
};

struct MiningConfig {
  MatchPolicy policy = MatchPolicy::kMutualBest;
  double min_score = 0.0;
  SearchOptions search{256, 0};
  std::vector<double> histogram_edges = uniform_edges(0.5, 1.0, 0.05);
};

struct SplitConfig {
  SplitSpec spec;  // rng_seed is filled per pair from the global seed
  text::Normalization normalization = text::Normalization::kCasefoldWs;
  text::Normalization check_normalization = text::Normalization::kCasefoldWs;
  bool dedup_train = true;
  double length_tolerance = 0.2;
};

struct PipelineConfig {
  std::map<std::string, CorpusPaths> corpora;
  std::vector<LangPair> pairs;
  MiningConfig mining;
  SplitConfig split;
  metrics::ScoringConfig scoring;
  std::size_t n_resamples = 1000;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  nlohmann::json source;  // the parsed document, before path resolution

  /// Stable digest of every setting that can change an output byte. The
  /// output directory is excluded; the seed is included.
  std::string hash() const {
    nlohmann::json canon = source;
    canon.erase("output_dir");
    canon["seed"] = seed;
    return to_hex(xxh64(canon.dump()));
  }

  std::uint64_t stage_seed(std::string_view stage, const LangPair& pair) const {
    return derive_seed(seed, std::string(stage) + ":" + pair.label());
  }

  const CorpusPaths& paths(const std::string& lang) const {
    auto it = corpora.find(lang);
    if (it == corpora.end()) throw Error(ErrorCode::kInvalidConfig, "no corpus declared for language '" + lang + "'");
    return it->second;
  }

  std::filesystem::path pair_dir(const LangPair& pair) const { return output_dir / pair.label(); }
};

namespace detail {

template <typename T>
T get_or(const nlohmann::json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("bad value for '") + key + "': " + e.what());
  }
}

inline const nlohmann::json& section(const nlohmann::json& doc, const char* key) {
  static const nlohmann::json kEmpty = nlohmann::json::object();
  if (!doc.contains(key)) return kEmpty;
  if (!doc.at(key).is_object()) throw Error(ErrorCode::kInvalidConfig, std::string("'") + key + "' must be an object");
  return doc.at(key);
}

}  // namespace detail

inline PipelineConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {}) {
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be a JSON object");
  using detail::get_or;
  PipelineConfig cfg;
  cfg.source = doc;
  const auto resolve = [&](const std::string& p) -> std::filesystem::path {
    if (p.empty() || std::filesystem::path(p).is_absolute()) return p;
    return base_dir / p;
  };

  cfg.seed = get_or<std::uint64_t>(doc, "seed", 0);
  cfg.output_dir = resolve(get_or<std::string>(doc, "output_dir", "out"));

  for (const auto& [lang, entry] : detail::section(doc, "corpora").items()) {
    if (!entry.is_object() || !entry.contains("corpus")) {
      throw Error(ErrorCode::kInvalidConfig, "corpus entry '" + lang + "' needs a \"corpus\" path");
    }
    cfg.corpora[lang] = CorpusPaths{resolve(get_or<std::string>(entry, "corpus", "")),
                                    resolve(get_or<std::string>(entry, "embeddings", ""))};
  }
  if (doc.contains("pairs")) {
    if (!doc.at("pairs").is_array()) throw Error(ErrorCode::kInvalidConfig, "'pairs' must be an array");
    for (const auto& p : doc.at("pairs")) {
      if (!p.is_string()) throw Error(ErrorCode::kInvalidConfig, "pair entries must be strings");
      LangPair pair = parse_pair(p.get<std::string>());
      cfg.paths(pair.src);
      cfg.paths(pair.tgt);
      cfg.pairs.push_back(std::move(pair));
    }
  }

  const auto& mining = detail::section(doc, "mining");
  try {
    cfg.mining.policy = parse_policy(get_or<std::string>(mining, "policy", "mutual_best"));
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  cfg.mining.min_score = get_or<double>(mining, "min_score", 0.0);
  cfg.mining.search.block_size = get_or<std::size_t>(mining, "block_size", 256);
  cfg.mining.search.workers = get_or<unsigned>(mining, "workers", 0);
  if (mining.contains("histogram_edges")) cfg.mining.histogram_edges = get_or<std::vector<double>>(mining, "histogram_edges", {});
  try {
    validate_edges(cfg.mining.histogram_edges);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }

  const auto& split = detail::section(doc, "split");
  cfg.split.spec.devtest_min = get_or<double>(split, "devtest_min", 0.8);
  cfg.split.spec.train_max = get_or<double>(split, "train_max", cfg.split.spec.devtest_min);
  if (split.contains("train_bins")) {
    cfg.split.spec.train_bins.clear();
    for (const auto& bin : split.at("train_bins")) {
      cfg.split.spec.train_bins.push_back({get_or<std::string>(bin, "name", ""), get_or<double>(bin, "min", 0.0)});
    }
  }
  try {
    cfg.split.normalization = parse_normalization(get_or<std::string>(split, "normalization", "casefold_ws"));
    cfg.split.check_normalization = parse_normalization(get_or<std::string>(split, "check_normalization", "casefold_ws"));
    cfg.split.spec.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  cfg.split.dedup_train = get_or<bool>(split, "dedup_train", true);
  cfg.split.length_tolerance = get_or<double>(split, "length_tolerance", 0.2);

  const auto& scoring = detail::section(doc, "scoring");
  try {
    cfg.scoring.bleu_max_order = get_or<int>(scoring, "bleu_max_order", 4);
    cfg.scoring.bleu_smoothing = metrics::parse_smoothing(get_or<std::string>(scoring, "bleu_smoothing", "exponential"));
    cfg.scoring.tokenizer = metrics::parse_tokenizer(get_or<std::string>(scoring, "tokenizer", "intl"));
    cfg.scoring.chrf_char_order = get_or<int>(scoring, "chrf_char_order", 6);
    cfg.scoring.chrf_beta = get_or<double>(scoring, "chrf_beta", 2.0);
    cfg.scoring.chrf_word_order = get_or<int>(scoring, "chrf_word_order", 0);
    cfg.scoring.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  cfg.n_resamples = get_or<std::size_t>(scoring, "n_resamples", 1000);
  return cfg;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open config " + path.string(), Error::npos, Error::npos, path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kInvalidConfig, path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

}  // namespace anuvaad::pipeline
