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

// anuvaad: command-line front end for corpus mining, dataset splitting and
// translation scoring.
//
// Exit codes: 0 success, 1 input or validation error, 2 contamination found.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "anuvaad/metrics.hpp"
#include "anuvaad/pipeline/config.hpp"
#include "anuvaad/pipeline/stages.hpp"

namespace {

namespace fs = std::filesystem;
using namespace anuvaad;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitContamination = 2;

struct CommonOptions {
  std::string config;
  std::string pair;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct ScoreOptions {
  std::string ref;
  std::string hyp;
  std::string hyp_b;
  std::string metric = "bleu";
  std::optional<std::size_t> resamples;
  unsigned workers = 1;
};

void add_common(CLI::App* sub, CommonOptions& o, bool config_required) {
  auto* cfg = sub->add_option("--config", o.config, "Pipeline config (JSON)");
  if (config_required) cfg->required()->check(CLI::ExistingFile);
  sub->add_option("--pair", o.pair, "Language pair SRC-TGT (default: all pairs in the config)");
  sub->add_option("--seed", o.seed, "Override the global seed");
  sub->add_option("--out", o.out, "Output directory (overrides the config)");
}

pipeline::PipelineConfig make_config(const CommonOptions& o) {
  pipeline::PipelineConfig cfg =
      o.config.empty() ? pipeline::parse_config(nlohmann::json::object()) : pipeline::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output_dir = o.out;
  return cfg;
}

std::vector<pipeline::LangPair> selected_pairs(const pipeline::PipelineConfig& cfg, const CommonOptions& o) {
  if (o.pair.empty()) {
    if (cfg.pairs.empty()) throw Error(ErrorCode::kInvalidConfig, "config declares no language pairs");
    return cfg.pairs;
  }
  pipeline::LangPair p = pipeline::parse_pair(o.pair);
  cfg.paths(p.src);
  cfg.paths(p.tgt);
  return {p};
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string(), Error::npos, Error::npos, path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

using AnyMetric = std::variant<metrics::Bleu, metrics::Chrf, metrics::Wer>;

AnyMetric make_metric(const std::string& name, const metrics::ScoringConfig& cfg) {
  if (name == "bleu") return metrics::Bleu(cfg);
  if (name == "chrf") return metrics::Chrf(cfg);
  if (name == "wer") return metrics::Wer();
  throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + name + "' (expected bleu, chrf or wer)");
}

void emit(const nlohmann::ordered_json& j, const pipeline::PipelineConfig& cfg, bool write, const std::string& file) {
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (write) pipeline::detail::write_file(cfg.output_dir / file, text);
}

int cmd_eval(const CommonOptions& common, const ScoreOptions& so) {
  const auto cfg = make_config(common);
  const auto refs = read_lines(so.ref);
  const auto hyps = read_lines(so.hyp);
  metrics::check_same_length(refs.size(), hyps.size());
  if (so.metric == "wer") metrics::wer(refs, hyps);  // rejects reference sets without words
  const std::size_t n = so.resamples.value_or(cfg.n_resamples);
  const auto metric = make_metric(so.metric, cfg.scoring);
  const auto report = std::visit(
      [&](const auto& m) {
        if (refs.size() < 2) {
          metrics::MetricReport r;
          r.metric = m.name();
          r.value = metrics::corpus_score(m, refs, hyps);
          r.ci_low = r.ci_high = r.value;
          r.seed = cfg.seed;
          return r;
        }
        return metrics::bootstrap_ci(m, refs, hyps, n, cfg.seed, so.workers);
      },
      metric);
  if (refs.empty()) throw Error(ErrorCode::kEmptyCorpus, "no sentences to score");
  nlohmann::ordered_json j = metrics::to_json(report, cfg.scoring);
  j["config_hash"] = cfg.hash();
  emit(j, cfg, !common.out.empty(), "eval." + so.metric + ".json");
  return kExitOk;
}

int cmd_compare(const CommonOptions& common, const ScoreOptions& so) {
  const auto cfg = make_config(common);
  const auto refs = read_lines(so.ref);
  const auto hyps_a = read_lines(so.hyp);
  const auto hyps_b = read_lines(so.hyp_b);
  metrics::check_same_length(refs.size(), hyps_a.size());
  metrics::check_same_length(refs.size(), hyps_b.size());
  const std::size_t n = so.resamples.value_or(cfg.n_resamples);
  const auto metric = make_metric(so.metric, cfg.scoring);
  const auto result = std::visit(
      [&](const auto& m) { return metrics::paired_bootstrap_test(m, refs, hyps_a, hyps_b, n, cfg.seed, so.workers); },
      metric);
  nlohmann::ordered_json j;
  j["metric"] = result.metric;
  j["system_a"] = {{"path", so.hyp}, {"score", result.score_a}};
  j["system_b"] = {{"path", so.hyp_b}, {"score", result.score_b}};
  j["delta"] = result.delta_observed;
  j["p_value"] = result.p_value;
  j["n_resamples"] = result.n_resamples;
  j["seed"] = result.seed;
  j["config"] = metrics::to_json(cfg.scoring);
  j["config_hash"] = cfg.hash();
  emit(j, cfg, !common.out.empty(), "compare." + so.metric + ".json");
  return kExitOk;
}

int cmd_mine(const CommonOptions& common) {
  const auto cfg = make_config(common);
  for (const auto& pair : selected_pairs(cfg, common)) {
    const auto outcome = pipeline::run_mine(cfg, pair);
    std::cerr << pair.label() << ": " << outcome.pairs.size() << " pairs mined ("
              << to_string(cfg.mining.policy) << ", min_score " << cfg.mining.min_score << ")\n";
  }
  return kExitOk;
}

int cmd_split(const CommonOptions& common) {
  const auto cfg = make_config(common);
  for (const auto& pair : selected_pairs(cfg, common)) {
    try {
      const auto outcome = pipeline::run_split(cfg, pair);
      if (outcome.empty_input) std::cerr << "warning: " << pair.label() << ": no mined pairs, manifests are empty\n";
      std::cerr << render_stats_table(outcome.stats);
    } catch (const pipeline::ContaminationError& e) {
      std::cerr << "error: " << pair.label() << ": " << e.what() << "\n";
      for (const auto& v : e.violations()) {
        std::cerr << "  pool " << v.pool_id << " == dev/test " << v.devtest_id << ": " << v.text << "\n";
      }
      return kExitContamination;
    }
  }
  return kExitOk;
}

int cmd_stats(const CommonOptions& common) {
  const auto cfg = make_config(common);
  for (const auto& pair : selected_pairs(cfg, common)) std::cout << render_stats_table(pipeline::run_stats(cfg, pair));
  return kExitOk;
}

int cmd_check(const CommonOptions& common) {
  const auto cfg = make_config(common);
  int code = kExitOk;
  for (const auto& pair : selected_pairs(cfg, common)) {
    const auto violations = pipeline::run_check(cfg, pair);
    std::cout << pair.label() << ": " << violations.size() << " violation(s)\n";
    for (const auto& v : violations) std::cout << "  pool " << v.pool_id << " == dev/test " << v.devtest_id << ": " << v.text << "\n";
    if (!violations.empty()) code = kExitContamination;
  }
  return code;
}

int cmd_import(const CommonOptions& common) {
  const auto cfg = make_config(common);
  std::cout << pipeline::run_import(cfg).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anuvaad: bitext mining, dataset splitting and translation scoring"};
  app.require_subcommand(1);

  CommonOptions common;
  ScoreOptions score;

  auto* import = app.add_subcommand("import", "Validate corpora and embeddings and summarize them");
  add_common(import, common, true);
  auto* mine = app.add_subcommand("mine", "Mine cross-lingual pairs and a score histogram");
  add_common(mine, common, true);
  auto* split = app.add_subcommand("split", "Build dev/test, training tiers and the ASR pool from mined pairs");
  add_common(split, common, true);
  auto* stats = app.add_subcommand("stats", "Recompute statistics from written manifests");
  add_common(stats, common, true);
  auto* check = app.add_subcommand("check", "Check ASR pools against dev/test manifests");
  add_common(check, common, true);

  auto* eval = app.add_subcommand("eval", "Score a hypothesis file with a bootstrap confidence interval");
  add_common(eval, common, false);
  eval->add_option("--ref", score.ref, "Reference file, one sentence per line")->required()->check(CLI::ExistingFile);
  eval->add_option("--hyp", score.hyp, "Hypothesis file, line-aligned with --ref")->required()->check(CLI::ExistingFile);
  eval->add_option("--metric", score.metric, "bleu, chrf or wer")->check(CLI::IsMember({"bleu", "chrf", "wer"}));
  eval->add_option("--resamples", score.resamples, "Bootstrap resamples (default: config or 1000)");
  eval->add_option("--workers", score.workers, "Threads for resampling");

  auto* compare = app.add_subcommand("compare", "Paired bootstrap test: is system A better than system B?");
  add_common(compare, common, false);
  compare->add_option("--ref", score.ref, "Reference file")->required()->check(CLI::ExistingFile);
  compare->add_option("--hyp-a", score.hyp, "System A hypotheses")->required()->check(CLI::ExistingFile);
  compare->add_option("--hyp-b", score.hyp_b, "System B hypotheses")->required()->check(CLI::ExistingFile);
  compare->add_option("--metric", score.metric, "bleu, chrf or wer")->check(CLI::IsMember({"bleu", "chrf", "wer"}));
  compare->add_option("--resamples", score.resamples, "Bootstrap resamples (default: config or 1000)");
  compare->add_option("--workers", score.workers, "Threads for resampling");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*import) return cmd_import(common);
    if (*mine) return cmd_mine(common);
    if (*split) return cmd_split(common);
    if (*stats) return cmd_stats(common);
    if (*check) return cmd_check(common);
    if (*eval) return cmd_eval(common, score);
    if (*compare) return cmd_compare(common, score);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
