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

// Corpus stages of the command-line pipeline. Each stage reads its inputs
// from the config and the output tree of earlier stages, and writes under
// <output_dir>/<src>-<tgt>/:
//
//   mined.tsv                 mine
//   histogram.json            mine
//   dev.jsonl test.jsonl      split (one manifest per split, plus
//   S1.jsonl ... S5.jsonl            discarded.jsonl and leaked.jsonl)
//   asr_pool.<lang>.txt       split
//   stats.json stats.txt      split, stats
//   length_bias.json          split, stats
//   contamination.json        split (only on violation), check
//
// Every file carries the config hash and seed: as a leading "#" line in
// text files, as fields in JSON and JSONL.

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "anuvaad/corpus.hpp"
#include "anuvaad/error.hpp"
#include "anuvaad/miner.hpp"
#include "anuvaad/pipeline/config.hpp"
#include "anuvaad/splits.hpp"

namespace anuvaad::pipeline {

/// Raised by the split stage when the ASR pool overlaps dev/test.
class ContaminationError : public std::runtime_error {
 public:
  explicit ContaminationError(std::vector<Violation> violations)
      : std::runtime_error(std::to_string(violations.size()) + " contamination violation(s)"),
        violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

namespace detail {

inline std::string provenance_line(const PipelineConfig& cfg, std::uint64_t seed) {
  return "anuvaad config_hash=" + cfg.hash() + " seed=" + std::to_string(seed);
}

inline void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string(), Error::npos, Error::npos, path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string(), Error::npos, Error::npos, path.string());
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string(), Error::npos, Error::npos, path.string());
  return in;
}

inline nlohmann::ordered_json provenance(const PipelineConfig& cfg, std::uint64_t seed) {
  return {{"config_hash", cfg.hash()}, {"seed", seed}};
}

}  // namespace detail

struct LoadedLanguage {
  Corpus corpus;
  EmbeddingMatrix embeddings;
};

inline Corpus load_language_corpus(const PipelineConfig& cfg, const std::string& lang) {
  Corpus c = load_corpus(cfg.paths(lang).corpus);
  if (!c.records.empty() && c.lang != lang) {
    throw Error(ErrorCode::kMalformedRecord, "corpus " + cfg.paths(lang).corpus.string() + " has lang '" + c.lang +
                                                 "', config declares '" + lang + "'");
  }
  if (c.records.empty()) c.lang = lang;
  return c;
}

inline LoadedLanguage load_language(const PipelineConfig& cfg, const std::string& lang) {
  LoadedLanguage out;
  out.corpus = load_language_corpus(cfg, lang);
  const auto& emb = cfg.paths(lang).embeddings;
  if (emb.empty()) throw Error(ErrorCode::kInvalidConfig, "no embeddings declared for language '" + lang + "'");
  out.embeddings = normalize_rows(load_embeddings(emb, out.corpus));
  return out;
}

// ---------------------------------------------------------------------------
// import

/// Validates every declared corpus and embedding file (including that every
/// row can be normalized) and writes a summary to <output_dir>/import/.
inline nlohmann::ordered_json run_import(const PipelineConfig& cfg) {
  nlohmann::ordered_json all = nlohmann::ordered_json::array();
  for (const auto& [lang, paths] : cfg.corpora) {
    const Corpus corpus = load_language_corpus(cfg, lang);
    nlohmann::ordered_json j;
    j["lang"] = lang;
    j["records"] = corpus.size();
    double seconds = 0.0;
    for (const auto& r : corpus.records) seconds += r.duration_s;
    j["hours"] = seconds / 3600.0;
    if (!paths.embeddings.empty()) {
      const EmbeddingMatrix raw = load_embeddings(paths.embeddings, corpus);
      double min_norm = std::numeric_limits<double>::infinity(), max_norm = 0.0;
      for (std::size_t i = 0; i < raw.rows(); ++i) {
        double sq = 0.0;
        for (float v : raw.row(i)) sq += static_cast<double>(v) * v;
        min_norm = std::min(min_norm, std::sqrt(sq));
        max_norm = std::max(max_norm, std::sqrt(sq));
      }
      normalize_rows(raw);
      j["dim"] = raw.dim();
      j["min_norm"] = raw.rows() ? min_norm : 0.0;
      j["max_norm"] = max_norm;
    }
    j.update(detail::provenance(cfg, cfg.seed));
    detail::write_file(cfg.output_dir / "import" / (lang + ".json"), j.dump(2) + "\n");
    all.push_back(std::move(j));
  }
  return all;
}

// ---------------------------------------------------------------------------
// mine

struct MineOutcome {
  std::vector<MinedPair> pairs;  // scores as written to the TSV
  Histogram histogram;
};

inline nlohmann::ordered_json to_json(const Histogram& h) {
  return {{"edges", h.edges}, {"counts", h.counts}, {"underflow", h.underflow}, {"overflow", h.overflow}, {"total", h.total()}};
}

inline MineOutcome run_mine(const PipelineConfig& cfg, const LangPair& pair) {
  const LoadedLanguage src = load_language(cfg, pair.src);
  const LoadedLanguage tgt = load_language(cfg, pair.tgt);
  MineOutcome out;
  out.pairs = mine_pairs(src.embeddings, tgt.embeddings, cfg.mining.min_score, cfg.mining.policy, cfg.mining.search);
  for (auto& p : out.pairs) p.score = quantize_score(p.score);
  out.histogram = score_histogram(out.pairs, cfg.mining.histogram_edges);

  const auto dir = cfg.pair_dir(pair);
  std::ostringstream tsv;
  write_pairs_tsv(tsv, out.pairs, src.embeddings.ids(), tgt.embeddings.ids(), detail::provenance_line(cfg, cfg.seed));
  detail::write_file(dir / "mined.tsv", tsv.str());

  nlohmann::ordered_json hist = to_json(out.histogram);
  hist["pair"] = pair.label();
  hist["policy"] = to_string(cfg.mining.policy);
  hist["min_score"] = cfg.mining.min_score;
  hist.update(detail::provenance(cfg, cfg.seed));
  detail::write_file(dir / "histogram.json", hist.dump(2) + "\n");
  return out;
}

// ---------------------------------------------------------------------------
// split / stats / check

namespace detail {

inline std::string manifest_text(const PipelineConfig& cfg, std::uint64_t seed, const std::string& split,
                                 std::span<const MinedPair> pairs, const Corpus& src, const Corpus& tgt) {
  std::string out;
  const std::string hash = cfg.hash();
  for (const auto& p : pairs) {
    const auto& a = src.records[p.src_idx];
    const auto& b = tgt.records[p.tgt_idx];
    nlohmann::ordered_json j;
    j["src_id"] = a.id;
    j["tgt_id"] = b.id;
    j["src_text"] = a.text;
    j["tgt_text"] = b.text;
    j["src_audio_ref"] = a.audio_ref;
    j["tgt_audio_ref"] = b.audio_ref;
    j["score"] = p.score;
    j["split"] = split;
    j["config_hash"] = hash;
    j["seed"] = seed;
    out += j.dump();
    out += '\n';
  }
  return out;
}

inline std::vector<MinedPair> read_manifest(const std::filesystem::path& path, const Corpus& src, const Corpus& tgt) {
  std::unordered_map<std::string_view, std::size_t> si, ti;
  for (std::size_t i = 0; i < src.size(); ++i) si.emplace(src.records[i].id, i);
  for (std::size_t i = 0; i < tgt.size(); ++i) ti.emplace(tgt.records[i].id, i);
  std::ifstream in = open_input(path);
  std::vector<MinedPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fail = [&](const std::string& why) {
      return Error(ErrorCode::kMalformedRecord, path.string() + ":" + std::to_string(line_no) + ": " + why, line_no);
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw fail(e.what());
    }
    if (!j.is_object() || !j.contains("src_id") || !j.contains("tgt_id") || !j.contains("score")) {
      throw fail("manifest record needs src_id, tgt_id and score");
    }
    const auto s = si.find(j["src_id"].get<std::string>());
    const auto t = ti.find(j["tgt_id"].get<std::string>());
    if (s == si.end() || t == ti.end()) {
      throw Error(ErrorCode::kDanglingIndex, path.string() + ":" + std::to_string(line_no) + ": unknown id", line_no);
    }
    pairs.push_back({s->second, t->second, j["score"].get<double>()});
  }
  return pairs;
}

inline std::string pool_text(const PipelineConfig& cfg, std::uint64_t seed, std::span<const std::size_t> rows,
                             const Corpus& corpus) {
  std::string out = "# " + provenance_line(cfg, seed) + "\n";
  for (auto i : rows) out += corpus.records[i].id + "\n";
  return out;
}

inline std::vector<std::size_t> read_pool(const std::filesystem::path& path, const Corpus& corpus) {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < corpus.size(); ++i) index.emplace(corpus.records[i].id, i);
  std::ifstream in = open_input(path);
  std::vector<std::size_t> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    auto it = index.find(line);
    if (it == index.end()) throw Error(ErrorCode::kDanglingIndex, path.string() + ": unknown id '" + line + "'");
    rows.push_back(it->second);
  }
  return rows;
}

inline nlohmann::ordered_json violations_json(const PipelineConfig& cfg, std::uint64_t seed, const LangPair& pair,
                                              text::Normalization norm, std::span<const Violation> violations) {
  nlohmann::ordered_json j;
  j["pair"] = pair.label();
  j["normalization"] = to_string(norm);
  j["count"] = violations.size();
  auto& list = j["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : violations) list.push_back({{"text", v.text}, {"pool_id", v.pool_id}, {"devtest_id", v.devtest_id}});
  j.update(provenance(cfg, seed));
  return j;
}

inline void write_reports(const PipelineConfig& cfg, std::uint64_t seed, const LangPair& pair,
                          const SplitAssignment& a, const Corpus& src, const Corpus& tgt) {
  const auto dir = cfg.pair_dir(pair);
  const SplitStats stats = compute_stats(a, src, tgt);
  nlohmann::ordered_json sj = to_json(stats);
  sj.update(provenance(cfg, seed));
  write_file(dir / "stats.json", sj.dump(2) + "\n");
  write_file(dir / "stats.txt", "# " + provenance_line(cfg, seed) + "\n" + render_stats_table(stats));

  nlohmann::ordered_json lj = to_json(length_bias_report(a, src, tgt, cfg.split.length_tolerance));
  lj.update(provenance(cfg, seed));
  write_file(dir / "length_bias.json", lj.dump(2) + "\n");
}

}  // namespace detail

struct SplitOutcome {
  SplitAssignment assignment;
  SplitStats stats;
  bool empty_input = false;
};

/// Buckets the mined pairs of `pair` and writes manifests, pools and reports.
/// Throws ContaminationError (after writing contamination.json, and before
/// any manifest) when the pool overlaps dev/test.
inline SplitOutcome run_split(const PipelineConfig& cfg, const LangPair& pair) {
  const Corpus src = load_language_corpus(cfg, pair.src);
  const Corpus tgt = load_language_corpus(cfg, pair.tgt);
  const auto dir = cfg.pair_dir(pair);
  std::vector<MinedPair> pairs;
  {
    std::ifstream in = detail::open_input(dir / "mined.tsv");
    pairs = read_pairs_tsv(in, src, tgt);
  }

  SplitSpec spec = cfg.split.spec;
  spec.rng_seed = cfg.stage_seed("split", pair);
  SplitOutcome out;
  out.empty_input = pairs.empty();
  out.assignment = build_dataset(pairs, src, tgt, spec, cfg.split.normalization, cfg.split.dedup_train);

  const auto [pool, devtest] = contamination_inputs(out.assignment, src, tgt);
  const auto violations = check_contamination(pool, devtest, cfg.split.check_normalization);
  std::filesystem::remove(dir / "contamination.json");
  if (!violations.empty()) {
    detail::write_file(dir / "contamination.json",
                       detail::violations_json(cfg, spec.rng_seed, pair, cfg.split.check_normalization, violations).dump(2) + "\n");
    throw ContaminationError(violations);
  }

  for (const auto& [name, split_pairs] : out.assignment.named_splits()) {
    detail::write_file(dir / (name + ".jsonl"), detail::manifest_text(cfg, spec.rng_seed, name, *split_pairs, src, tgt));
  }
  detail::write_file(dir / "discarded.jsonl",
                     detail::manifest_text(cfg, spec.rng_seed, "discarded", out.assignment.discarded, src, tgt));
  detail::write_file(dir / "leaked.jsonl",
                     detail::manifest_text(cfg, spec.rng_seed, "leaked", out.assignment.leaked, src, tgt));
  detail::write_file(dir / ("asr_pool." + src.lang + ".txt"), detail::pool_text(cfg, spec.rng_seed, out.assignment.asr_pool.src, src));
  detail::write_file(dir / ("asr_pool." + tgt.lang + ".txt"), detail::pool_text(cfg, spec.rng_seed, out.assignment.asr_pool.tgt, tgt));
  detail::write_reports(cfg, spec.rng_seed, pair, out.assignment, src, tgt);
  out.stats = compute_stats(out.assignment, src, tgt);
  return out;
}

/// Rebuilds an assignment from the manifests written by run_split.
inline SplitAssignment read_assignment(const PipelineConfig& cfg, const LangPair& pair, const Corpus& src,
                                       const Corpus& tgt) {
  const auto dir = cfg.pair_dir(pair);
  SplitAssignment a;
  a.dev = detail::read_manifest(dir / "dev.jsonl", src, tgt);
  a.test = detail::read_manifest(dir / "test.jsonl", src, tgt);
  for (const auto& bin : cfg.split.spec.train_bins) {
    a.train.emplace_back(bin.name, detail::read_manifest(dir / (bin.name + ".jsonl"), src, tgt));
  }
  if (std::filesystem::exists(dir / "discarded.jsonl")) a.discarded = detail::read_manifest(dir / "discarded.jsonl", src, tgt);
  a.asr_pool.src = detail::read_pool(dir / ("asr_pool." + src.lang + ".txt"), src);
  a.asr_pool.tgt = detail::read_pool(dir / ("asr_pool." + tgt.lang + ".txt"), tgt);
  return a;
}

/// Recomputes stats.json, stats.txt and length_bias.json from the manifests.
inline SplitStats run_stats(const PipelineConfig& cfg, const LangPair& pair) {
  const Corpus src = load_language_corpus(cfg, pair.src);
  const Corpus tgt = load_language_corpus(cfg, pair.tgt);
  const SplitAssignment a = read_assignment(cfg, pair, src, tgt);
  detail::write_reports(cfg, cfg.stage_seed("split", pair), pair, a, src, tgt);
  return compute_stats(a, src, tgt);
}

/// Checks the written ASR pools against the dev/test manifests and writes
/// contamination.json. Returns the violations.
inline std::vector<Violation> run_check(const PipelineConfig& cfg, const LangPair& pair) {
  const Corpus src = load_language_corpus(cfg, pair.src);
  const Corpus tgt = load_language_corpus(cfg, pair.tgt);
  const SplitAssignment a = read_assignment(cfg, pair, src, tgt);
  const auto [pool, devtest] = contamination_inputs(a, src, tgt);
  auto violations = check_contamination(pool, devtest, cfg.split.check_normalization);
  detail::write_file(cfg.pair_dir(pair) / "contamination.json",
                     detail::violations_json(cfg, cfg.stage_seed("split", pair), pair, cfg.split.check_normalization,
                                             violations)
                             .dump(2) +
                         "\n");
  return violations;
}

}  // namespace anuvaad::pipeline
