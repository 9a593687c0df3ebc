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

// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Tolerances are fixed below.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "anuvaad/metrics.hpp"
#include "anuvaad/miner.hpp"
#include "anuvaad/pipeline/config.hpp"
#include "anuvaad/splits.hpp"
#include "support/fixtures.hpp"
#include "support/synth.hpp"

namespace {

namespace fs = std::filesystem;
using namespace anuvaad;
using Clock = std::chrono::steady_clock;

constexpr double kScoreTolerance = 1e-6;
constexpr double kMiningBudgetSeconds = 60.0;
constexpr double kParityTolerance = 0.05;
constexpr double kHoursTolerance = 1e-9;
constexpr double kPointTolerance = 1e-9;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    if (detail.size() < 600) detail += (detail.empty() ? "" : "; ") + why;
  }
};

int run_cli(const std::string& args, const fs::path& scratch, std::string* err = nullptr) {
  const auto errfile = scratch / "cli.stderr";
  const std::string cmd =
      std::string(ANUVAAD_CLI_PATH) + " " + args + " >" + (scratch / "cli.stdout").string() + " 2>" + errfile.string();
  const int status = std::system(cmd.c_str());
  if (err) *err = testing::read_text(errfile);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// ---------------------------------------------------------------------------
// Mining oracle equivalence

struct ScalarOracle {
  std::size_t n, m;
  std::vector<float> s;

  ScalarOracle(const EmbeddingMatrix& a, const EmbeddingMatrix& b) : n(a.rows()), m(b.rows()), s(n * m) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto u = a.row(i);
      for (std::size_t j = 0; j < m; ++j) {
        const auto v = b.row(j);
        double acc = 0;
        for (std::size_t k = 0; k < u.size(); ++k) acc += static_cast<double>(u[k]) * static_cast<double>(v[k]);
        s[i * m + j] = static_cast<float>(std::clamp(acc, -1.0, 1.0));
      }
    }
  }
  float at(std::size_t i, std::size_t j) const { return s[i * m + j]; }
  bool better(std::size_t i, std::size_t j, std::size_t i2, std::size_t j2) const {
    return at(i, j) > at(i2, j2);
  }
  std::vector<std::size_t> top(std::size_t i, std::size_t k) const {
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return at(i, x) > at(i, y); });
    idx.resize(k);
    return idx;
  }
  std::vector<MinedPair> mine(double t, MatchPolicy policy) const {
    std::vector<MinedPair> out;
    for (std::size_t i = 0; i < n; ++i) {
      if (policy == MatchPolicy::kAllAbove) {
        for (std::size_t j = 0; j < m; ++j)
          if (at(i, j) >= t) out.push_back({i, j, at(i, j)});
        continue;
      }
      std::size_t bj = 0;
      for (std::size_t j = 1; j < m; ++j)
        if (at(i, j) > at(i, bj)) bj = j;
      if (m == 0 || at(i, bj) < t) continue;
      if (policy == MatchPolicy::kMutualBest) {
        std::size_t bi = 0;
        for (std::size_t i2 = 1; i2 < n; ++i2)
          if (at(i2, bj) > at(bi, bj)) bi = i2;
        if (bi != i) continue;
      }
      out.push_back({i, bj, at(i, bj)});
    }
    return out;
  }
};

EmbeddingMatrix with_duplicates(EmbeddingMatrix base, const EmbeddingMatrix& from, std::mt19937_64& rng) {
  // Copies a few source rows into the target so exact scores of 1 and ties occur.
  std::vector<float> data(base.data().begin(), base.data().end());
  const std::size_t d = base.dim();
  for (int c = 0; c < 3 && base.rows() > 1 && from.rows() > 0; ++c) {
    const std::size_t src = rng() % from.rows();
    const std::size_t j1 = rng() % base.rows(), j2 = rng() % base.rows();
    std::copy(from.row(src).begin(), from.row(src).end(), data.begin() + j1 * d);
    std::copy(from.row(src).begin(), from.row(src).end(), data.begin() + j2 * d);
  }
  return EmbeddingMatrix(base.rows(), d, std::move(data), base.ids());
}

Outcome mining_oracle() {
  Outcome o;
  std::mt19937_64 rng(20260101);
  const std::size_t dims[] = {8, 64, 128};
  double max_err = 0, lib_seconds = 0;
  std::size_t comparisons = 0;
  const auto t0 = Clock::now();
  for (int c = 0; c < 50; ++c) {
    const std::size_t n = 1 + rng() % 1000, m = 8 + rng() % 993, d = dims[c % 3];
    const auto a = testing::random_unit_matrix(n, d, rng, "s");
    const auto b = with_duplicates(testing::random_unit_matrix(m, d, rng, "t"), a, rng);
    const ScalarOracle oracle(a, b);
    const SearchOptions opts{static_cast<std::size_t>(16 << (c % 5)), 1 + static_cast<unsigned>(c % 3)};
    for (std::size_t k : {1u, 8u}) {
      const auto t1 = Clock::now();
      const auto nb = top_k(a, b, k, opts);
      lib_seconds += seconds_since(t1);
      ++comparisons;
      for (std::size_t i = 0; i < n; ++i) {
        const auto want = oracle.top(i, k);
        for (std::size_t r = 0; r < k; ++r) {
          if (nb[i][r].idx != want[r]) {
            o.fail("corpus " + std::to_string(c) + " top_k index mismatch row " + std::to_string(i));
            break;
          }
          max_err = std::max(max_err, std::abs(double(nb[i][r].score) - oracle.at(i, want[r])));
        }
      }
    }
    const double t = d == 8 ? 0.6 : 0.15;
    for (auto policy : {MatchPolicy::kMutualBest, MatchPolicy::kForwardBest, MatchPolicy::kAllAbove}) {
      const auto t1 = Clock::now();
      const auto got = mine_pairs(a, b, t, policy, opts);
      lib_seconds += seconds_since(t1);
      const auto want = oracle.mine(t, policy);
      ++comparisons;
      if (got.size() != want.size()) {
        o.fail("corpus " + std::to_string(c) + " " + std::string(to_string(policy)) + " size " +
               std::to_string(got.size()) + " vs " + std::to_string(want.size()));
        continue;
      }
      for (std::size_t p = 0; p < got.size(); ++p) {
        if (got[p].src_idx != want[p].src_idx || got[p].tgt_idx != want[p].tgt_idx) {
          o.fail("corpus " + std::to_string(c) + " " + std::string(to_string(policy)) + " pair mismatch");
          break;
        }
        max_err = std::max(max_err, std::abs(got[p].score - want[p].score));
      }
    }
  }
  const double total = seconds_since(t0);
  if (max_err > kScoreTolerance) o.fail("max score error " + std::to_string(max_err));
  if (total > kMiningBudgetSeconds) o.fail("runtime " + std::to_string(total) + " s");
  if (o.pass) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "50 corpora, %zu oracle comparisons, max |score error| %.3g, library %.2f s, total %.2f s (< %.0f s)",
                  comparisons, max_err, lib_seconds, total, kMiningBudgetSeconds);
    o.detail = buf;
  }
  return o;
}

// ---------------------------------------------------------------------------
// Mining determinism at scale

Outcome mining_determinism() {
  Outcome o;
  const std::size_t n = 10000, d = 256;
  std::mt19937_64 rng(77);
  const auto src = testing::random_unit_matrix(n, d, rng, "s");
  auto noise = testing::random_unit_matrix(n, d, rng, "t");
  std::vector<float> tdata(n * d);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = perm[j];
    const double w = j < 8000 ? 0.7 : 0.0;
    double sq = 0;
    for (std::size_t k = 0; k < d; ++k) {
      const double v = w * src.row(i)[k] + (1 - w) * noise.row(j)[k];
      tdata[j * d + k] = static_cast<float>(v);
      sq += v * v;
    }
    for (std::size_t k = 0; k < d; ++k) tdata[j * d + k] = static_cast<float>(tdata[j * d + k] / std::sqrt(sq));
  }
  const EmbeddingMatrix tgt(n, d, std::move(tdata), noise.ids());

  std::string reference;
  std::map<std::pair<unsigned, std::size_t>, double> times;
  std::size_t mined = 0;
  for (unsigned w : {1u, 4u}) {
    for (std::size_t bs : {32u, 4096u}) {
      const auto t0 = Clock::now();
      const auto pairs = mine_pairs(src, tgt, 0.0, MatchPolicy::kMutualBest, {bs, w});
      times[{w, bs}] = seconds_since(t0);
      std::ostringstream tsv;
      write_pairs_tsv(tsv, pairs, src.ids(), tgt.ids());
      if (reference.empty()) {
        reference = tsv.str();
        mined = pairs.size();
      } else if (tsv.str() != reference) {
        o.fail("output differs for workers=" + std::to_string(w) + " block=" + std::to_string(bs));
      }
    }
  }
  const double speedup = times[{1, 4096}] / times[{4, 4096}];
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "10000x10000 d=256 mutual_best, %zu pairs, byte-identical over workers {1,4} x blocks {32,4096}; "
                "1-worker %.1f s, 4-worker %.1f s, speedup %.2fx on %u hardware thread(s) (reported only)",
                mined, times[{1, 4096}], times[{4, 4096}], speedup, std::thread::hardware_concurrency());
  if (o.pass) o.detail = buf;
  return o;
}

// ---------------------------------------------------------------------------
// Split invariants

Outcome split_invariants() {
  Outcome o;
  std::mt19937_64 rng(314);
  const double bounds[] = {0.5, 0.6, 0.62, 0.68, 0.7, 0.8, 1.0, 0.49999, 0.79999};
  std::size_t total_pairs = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = rng() % 300;
    Corpus src, tgt;
    src.lang = "hi";
    tgt.lang = "bn";
    const std::size_t rows = n + 1 + rng() % 20;
    for (std::size_t i = 0; i < rows; ++i) {
      const std::string text = "sentence " + std::to_string(rng() % (rows + 40));
      src.records.push_back({"s" + std::to_string(i), "hi", (rng() % 3 == 0 ? "  SENTENCE" + text.substr(8) : text), "", 1});
      tgt.records.push_back({"t" + std::to_string(i), "bn", "vakya " + std::to_string(rng() % (rows + 40)), "", 1});
    }
    std::vector<std::size_t> sp(rows), tp(rows);
    std::iota(sp.begin(), sp.end(), 0);
    std::iota(tp.begin(), tp.end(), 0);
    std::shuffle(sp.begin(), sp.end(), rng);
    std::shuffle(tp.begin(), tp.end(), rng);
    std::uniform_real_distribution<double> u(-0.2, 1.0);
    std::vector<MinedPair> pairs;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = rng() % 4 == 0 ? bounds[rng() % std::size(bounds)] : quantize_score(u(rng));
      pairs.push_back({sp[k], tp[k], s});
    }
    pairs.push_back({sp[n], tp[n], 0.8});
    total_pairs += pairs.size();

    SplitSpec spec;
    spec.rng_seed = rng();
    const auto a = assign_splits(pairs, spec);
    const auto b = assign_splits(pairs, spec);
    const auto tag = "set " + std::to_string(t) + ": ";
    const auto keys = [](const std::vector<MinedPair>& v) {
      std::set<std::pair<std::size_t, std::size_t>> out;
      for (const auto& p : v) out.insert({p.src_idx, p.tgt_idx});
      return out;
    };
    if (keys(a.dev) != keys(b.dev) || keys(a.test) != keys(b.test)) o.fail(tag + "not seed-deterministic");
    for (std::size_t k = 0; k + 1 < a.train.size(); ++k) {
      const auto outer = keys(a.train[k].second);
      for (const auto& key : keys(a.train[k + 1].second))
        if (!outer.contains(key)) o.fail(tag + "nestedness broken at " + a.train[k + 1].first);
    }
    for (std::size_t k = 0; k < a.train.size(); ++k) {
      for (const auto& p : a.train[k].second)
        if (p.score < spec.train_bins[k].lower_bound || p.score >= spec.train_max) o.fail(tag + "tier bound");
    }
    const auto dev = keys(a.dev), test = keys(a.test);
    for (const auto& key : dev)
      if (test.contains(key)) o.fail(tag + "dev/test overlap");
    if (a.dev.size() < a.test.size() || a.dev.size() - a.test.size() > 1) o.fail(tag + "dev/test size gap");
    std::set<std::pair<std::size_t, std::size_t>> high, low;
    for (const auto& p : pairs) {
      if (p.score >= 0.8) high.insert({p.src_idx, p.tgt_idx});
      if (p.score < 0.5) low.insert({p.src_idx, p.tgt_idx});
    }
    auto dt = dev;
    dt.insert(test.begin(), test.end());
    if (dt != high) o.fail(tag + "dev+test != pairs >= 0.8");
    if (!dt.contains({sp[n], tp[n]})) o.fail(tag + "boundary pair 0.8 not in dev/test");
    for (const auto& tier : a.train)
      if (keys(tier.second).contains({sp[n], tp[n]})) o.fail(tag + "boundary pair in training");
    if (keys(a.discarded) != low) o.fail(tag + "discarded != pairs < 0.5");

    const auto full = build_dataset(pairs, src, tgt, spec, text::Normalization::kCasefoldWs);
    const auto [pool, devtest] = contamination_inputs(full, src, tgt);
    if (!check_contamination(pool, devtest, text::Normalization::kCasefoldWs).empty()) o.fail(tag + "pool contaminated");
  }
  if (o.pass) o.detail = "100 fuzzed score sets (" + std::to_string(total_pairs) + " pairs): nested, disjoint, gap <= 1, "
                         "0.8 -> dev/test, <0.5 -> discarded, deterministic, pool contamination-free";
  return o;
}

// ---------------------------------------------------------------------------
// Contamination

Outcome contamination() {
  Outcome o;
  std::mt19937_64 rng(99);
  const std::vector<std::string> words{"river", "école", "ÉTÉ", "नदी", "పాఠశాల", "শিক্ষা", "Straße", "data", "σοφία"};
  const auto sentence = [&] {
    std::string s;
    for (int w = 3 + rng() % 6; w > 0; --w) s += (s.empty() ? "" : " ") + words[rng() % words.size()] + std::to_string(rng() % 1000);
    return s;
  };
  const auto upper_ascii = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  };
  const auto respace = [&](const std::string& s) {
    std::string out = rng() % 2 ? "\t " : " ";
    for (char c : s) out += c == ' ' ? std::string(rng() % 2 ? "  " : " \t ") : std::string(1, c);
    return out + "  ";
  };
  std::size_t planted = 0, detected = 0, false_pos = 0, clean_violations = 0;
  for (int f = 0; f < 60; ++f) {
    std::vector<TextItem> devtest, pool, clean_pool;
    std::set<std::string> used;
    for (int i = 0; i < 20; ++i) devtest.push_back({"d" + std::to_string(i), sentence()});
    for (int i = 0; i < 40; ++i) {
      std::string s = sentence();
      clean_pool.push_back({"c" + std::to_string(i), s});
    }
    pool = clean_pool;
    std::set<std::string> planted_ids;
    for (int k = 0; k < 6; ++k) {
      const auto& src = devtest[rng() % devtest.size()].text;
      std::string variant;
      switch (k % 3) {
        case 0: variant = src; break;
        case 1: variant = respace(src); break;
        default: variant = upper_ascii(src); break;
      }
      const std::string id = "p" + std::to_string(k);
      pool.push_back({id, variant});
      planted_ids.insert(id);
    }
    planted += planted_ids.size();
    std::set<std::string> hit;
    for (const auto& v : check_contamination(pool, devtest, text::Normalization::kCasefoldWs)) {
      if (planted_ids.contains(v.pool_id)) {
        hit.insert(v.pool_id);
      } else {
        ++false_pos;
      }
    }
    detected += hit.size();
    clean_violations += check_contamination(clean_pool, devtest, text::Normalization::kCasefoldWs).size();
  }
  if (detected != planted) o.fail("recall " + std::to_string(detected) + "/" + std::to_string(planted));
  if (false_pos) o.fail(std::to_string(false_pos) + " unexpected violations");
  if (clean_violations) o.fail(std::to_string(clean_violations) + " violations on clean fixtures");

  const auto dir = testing::scratch_dir("acceptance_contamination");
  auto pc = testing::make_planted({{0.9, 4}, {0.7, 6}}, 4, 64, 3);
  pc.src.records.back().text = " " + upper_ascii(pc.src.records[0].text) + "\t";
  const auto cfg = testing::write_pipeline(dir, pc, {{"split", {{"normalization", "exact"}}}});
  std::string err;
  const int mine_code = run_cli("mine --config " + q(cfg), dir, &err);
  const int split_code = run_cli("split --config " + q(cfg), dir, &err);
  if (mine_code != 0 || split_code != 2) {
    o.fail("CLI exit codes mine=" + std::to_string(mine_code) + " split=" + std::to_string(split_code));
  } else if (err.find(pc.src.records.back().id) == std::string::npos) {
    o.fail("CLI did not list the violation");
  }
  if (o.pass) {
    o.detail = "recall " + std::to_string(detected) + "/" + std::to_string(planted) +
               " (exact, whitespace and case variants) under casefold_ws; 0 violations on 60 clean fixtures; "
               "CLI split exits 2 and lists the violation";
  }
  return o;
}

// ---------------------------------------------------------------------------
// Metric parity

std::size_t dp(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) t[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) t[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      t[i][j] = std::min({t[i - 1][j] + 1, t[i][j - 1] + 1, t[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
  return t[a.size()][b.size()];
}

Outcome metric_parity() {
  Outcome o;
  const auto fixtures = testing::metric_fixtures();
  double max_bleu = 0, max_chrf = 0;
  std::size_t corpora_20_100 = 0;
  bool indic = false;
  for (const auto& f : fixtures) {
    if (f.refs.size() >= 20 && f.refs.size() <= 100) ++corpora_20_100;
    for (const auto& r : f.refs) indic |= r.find("\xe0\xa4") != std::string::npos || r.find("\xe0\xb0") != std::string::npos;
    max_bleu = std::max({max_bleu, std::abs(metrics::bleu(f.refs, f.hyps) - f.expected["bleu"].get<double>()),
                         std::abs(metrics::bleu(f.refs, f.hyps_b) - f.expected["bleu_b"].get<double>())});
    max_chrf = std::max({max_chrf, std::abs(metrics::chrf(f.refs, f.hyps) - f.expected["chrf"].get<double>()),
                         std::abs(metrics::chrf(f.refs, f.hyps_b) - f.expected["chrf_b"].get<double>())});
  }
  if (corpora_20_100 < 3) o.fail("fewer than 3 fixture corpora of 20-100 sentences");
  if (!indic) o.fail("no Indic-script fixture");
  if (max_bleu > kParityTolerance) o.fail("BLEU deviation " + std::to_string(max_bleu));
  if (max_chrf > kParityTolerance) o.fail("chrF2 deviation " + std::to_string(max_chrf));

  std::vector<std::string> strings{""};
  for (std::size_t start = 0, len = 1; len <= 6; ++len) {
    const std::size_t end = strings.size();
    for (std::size_t i = start; i < end; ++i)
      for (char c : std::string("abc")) strings.push_back(strings[i] + c);
    start = end;
  }
  std::size_t wer_mismatch = 0;
  for (const auto& a : strings)
    for (const auto& b : strings)
      if (metrics::edit_distance<char>(a, b) != dp(a, b)) ++wer_mismatch;
  if (wer_mismatch) o.fail(std::to_string(wer_mismatch) + " WER edit-distance mismatches");
  if (o.pass) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%zu fixtures (%zu of 20-100 sentences, Indic included): max |BLEU diff| %.2g, max |chrF2 diff| "
                  "%.2g (tol %.2f); WER exact on all %zu^2 string pairs",
                  fixtures.size(), corpora_20_100, max_bleu, max_chrf, kParityTolerance, strings.size());
    o.detail = buf;
  }
  return o;
}

// ---------------------------------------------------------------------------
// End-to-end run shared by the statistics and smoke criteria

struct E2E {
  bool ok = false;
  std::string error;
  fs::path pair_dir;
  testing::PlantedCorpus pc;
};

const std::vector<testing::PlantedLevel> kDesign{{0.9, 12}, {0.55, 20}, {0.61, 10}, {0.65, 8},
                                                 {0.69, 6}, {0.75, 14}, {0.3, 10}};

E2E& e2e() {
  static E2E run = [] {
    E2E r;
    const auto dir = testing::scratch_dir("acceptance_e2e");
    r.pc = testing::make_planted(kDesign, 20, 256, 2024);
    const auto cfg = testing::write_pipeline(dir, r.pc, {{"mining", {{"min_score", 0.1}}}});
    for (const char* stage : {"import", "mine", "split"}) {
      std::string err;
      const int code = run_cli(std::string(stage) + " --config " + q(cfg), dir, &err);
      if (code != 0) {
        r.error = std::string(stage) + " exited " + std::to_string(code) + ": " + err;
        return r;
      }
    }
    r.pair_dir = dir / "out" / "hi-bn";
    r.ok = true;
    return r;
  }();
  return run;
}

std::vector<nlohmann::json> read_jsonl(const fs::path& path) {
  std::vector<nlohmann::json> out;
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  return out;
}

Outcome stats_arithmetic() {
  Outcome o;
  const E2E& r = e2e();
  if (!r.ok) {
    o.fail(r.error);
    return o;
  }
  std::map<std::string, double> src_dur, tgt_dur;
  for (const auto& rec : r.pc.src.records) src_dur[rec.id] = rec.duration_s;
  for (const auto& rec : r.pc.tgt.records) tgt_dur[rec.id] = rec.duration_s;
  const auto stats = nlohmann::json::parse(testing::read_text(r.pair_dir / "stats.json"));
  const std::string table = testing::read_text(r.pair_dir / "stats.txt");
  double max_err = 0;
  std::size_t checked = 0;
  for (const auto& s : stats["splits"]) {
    const std::string name = s["name"];
    const auto records = read_jsonl(r.pair_dir / (name + ".jsonl"));
    double hs = 0, ht = 0;
    for (const auto& rec : records) {
      hs += src_dur.at(rec["src_id"]);
      ht += tgt_dur.at(rec["tgt_id"]);
    }
    max_err = std::max({max_err, std::abs(hs / 3600.0 - s["hours_src"].get<double>()),
                        std::abs(ht / 3600.0 - s["hours_tgt"].get<double>())});
    if (s["pairs"].get<std::size_t>() != records.size()) o.fail(name + " JSON count != manifest lines");
    std::istringstream lines(table);
    bool found = false;
    for (std::string line; std::getline(lines, line);) {
      std::istringstream cols(line);
      std::string first;
      std::size_t count = 0;
      if (cols >> first && first == name && cols >> count) {
        found = true;
        if (count != records.size()) o.fail(name + " table count " + std::to_string(count) + " != manifest lines");
      }
    }
    if (!found) o.fail("table row missing for " + name);
    ++checked;
  }
  for (const auto& p : stats["asr_pool"]) {
    const std::string lang = p["lang"];
    const auto& dur = lang == "hi" ? src_dur : tgt_dur;
    std::ifstream in(r.pair_dir / ("asr_pool." + lang + ".txt"));
    double h = 0;
    std::size_t lines = 0;
    for (std::string line; std::getline(in, line);) {
      if (line.empty() || line[0] == '#') continue;
      h += dur.at(line);
      ++lines;
    }
    max_err = std::max(max_err, std::abs(h / 3600.0 - p["hours"].get<double>()));
    if (lines != p["utterances"].get<std::size_t>()) o.fail("pool count mismatch for " + lang);
  }
  if (max_err > kHoursTolerance) o.fail("hours error " + std::to_string(max_err));
  if (o.pass) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu splits + 2 pools: max |hours error| %.2g (tol %.0e); table counts == manifest lines",
                  checked, max_err, kHoursTolerance);
    o.detail = buf;
  }
  return o;
}

Outcome e2e_smoke() {
  Outcome o;
  const E2E& r = e2e();
  if (!r.ok) {
    o.fail(r.error);
    return o;
  }
  const std::map<std::string, std::size_t> want{{"dev", 6}, {"test", 6}, {"S1", 58}, {"S2", 38}, {"S3", 28},
                                                {"S4", 20}, {"S5", 14}, {"discarded", 10}};
  std::string counts;
  for (const auto& [name, n] : want) {
    const auto got = testing::count_data_lines(r.pair_dir / (name + ".jsonl"));
    counts += name + "=" + std::to_string(got) + " ";
    if (got != n) o.fail(name + " has " + std::to_string(got) + ", planted " + std::to_string(n));
  }
  const auto mined = testing::count_data_lines(r.pair_dir / "mined.tsv");
  const auto hist = nlohmann::json::parse(testing::read_text(r.pair_dir / "histogram.json"));
  std::size_t sum = hist["underflow"].get<std::size_t>() + hist["overflow"].get<std::size_t>();
  for (const auto& c : hist["counts"]) sum += c.get<std::size_t>();
  if (mined != 80) o.fail("mined " + std::to_string(mined) + " pairs, planted 80");
  if (sum != mined || hist["total"].get<std::size_t>() != mined) o.fail("histogram sum != mined pairs");
  for (const char* lang : {"hi", "bn"}) {
    const auto pool = testing::count_data_lines(r.pair_dir / ("asr_pool." + std::string(lang) + ".txt"));
    if (pool != 88) o.fail(std::string("pool ") + lang + " has " + std::to_string(pool) + ", expected 88");
  }
  if (o.pass) o.detail = "200 utterances, d=256: " + counts + "; histogram sums to " + std::to_string(sum) +
                         " = mined pairs; pool 88 per language";
  return o;
}

// ---------------------------------------------------------------------------
// Significance and bootstrap

Outcome significance() {
  Outcome o;
  const auto fixtures = testing::metric_fixtures();
  const auto& f = fixtures.front();
  std::vector<std::string> worse;
  for (const auto& r : f.refs) worse.push_back("noise " + r + " tail");
  for (std::size_t n : {100u, 1000u}) {
    const double p_same_bleu = metrics::paired_bootstrap_test(metrics::Bleu(), f.refs, f.hyps, f.hyps, n, 1).p_value;
    const double p_same_wer = metrics::paired_bootstrap_test(metrics::Wer(), f.refs, f.hyps, f.hyps, n, 1).p_value;
    if (p_same_bleu != 1.0 || p_same_wer != 1.0) o.fail("identical systems p != 1");
    for (double p : {metrics::paired_bootstrap_test(metrics::Bleu(), f.refs, f.refs, worse, n, 2).p_value,
                     metrics::paired_bootstrap_test(metrics::Chrf(), f.refs, f.refs, worse, n, 2).p_value,
                     metrics::paired_bootstrap_test(metrics::Wer(), f.refs, f.refs, worse, n, 2).p_value}) {
      if (p != 1.0 / (1.0 + n)) o.fail("dominant system p " + std::to_string(p));
    }
  }
  const auto exp = testing::expected_metrics()["paired"];
  const auto dir = testing::metric_fixture_dir() / exp["fixture"].get<std::string>();
  const auto refs = testing::read_lines(dir / "ref.txt");
  const auto a = testing::read_lines(dir / "hyp.txt");
  const auto b = testing::read_lines(dir / "hyp_b.txt");
  const auto seed = exp["seed"].get<std::uint64_t>();
  const auto n = exp["n_resamples"].get<std::size_t>();
  const double pb = metrics::paired_bootstrap_test(metrics::Bleu(), refs, a, b, n, seed).p_value;
  const double pc = metrics::paired_bootstrap_test(metrics::Chrf(), refs, a, b, n, seed, 4).p_value;
  const double pw = metrics::paired_bootstrap_test(metrics::Wer(), refs, a, b, n, seed).p_value;
  if (refs.size() != 10) o.fail("replay fixture is not 10 sentences");
  if (pb != exp["bleu_p"].get<double>()) o.fail("BLEU p " + std::to_string(pb) + " != replay");
  if (pc != exp["chrf_p"].get<double>()) o.fail("chrF p " + std::to_string(pc) + " != replay");
  if (pw != exp["wer_p"].get<double>()) o.fail("WER p " + std::to_string(pw) + " != replay");
  if (o.pass) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "identical -> p=1; dominant -> p=1/(1+N) for N in {100,1000}; 10-sentence replay (N=%zu) "
                  "BLEU p=%.6f chrF p=%.6f WER p=%.6f match exactly",
                  n, pb, pc, pw);
    o.detail = buf;
  }
  return o;
}

Outcome bootstrap_ci() {
  Outcome o;
  std::mt19937_64 rng(555);
  const std::vector<std::string> vocab{"the", "cat", "sat", "on", "mat", "नदी", "बहती", "है", "।", ",", "río", "fast"};
  const auto sentence = [&](std::size_t len) {
    std::string s;
    for (std::size_t w = 0; w < len; ++w) s += (w ? " " : "") + vocab[rng() % vocab.size()];
    return s;
  };
  std::size_t checks = 0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = 10 + rng() % 91;
    std::vector<std::string> refs, hyps;
    for (std::size_t i = 0; i < n; ++i) {
      refs.push_back(sentence(3 + rng() % 15));
      auto words = text::split_whitespace(refs.back());
      std::string h;
      for (auto w : words) {
        const auto roll = rng() % 10;
        if (roll == 0) continue;
        h += (h.empty() ? "" : " ") + (roll == 1 ? vocab[rng() % vocab.size()] : std::string(w));
      }
      hyps.push_back(h);
    }
    const auto check = [&](const metrics::MetricReport& r, const metrics::MetricReport& again) {
      ++checks;
      if (!(r == again)) o.fail("corpus " + std::to_string(c) + " " + r.metric + " not reproducible");
      if (r.ci_low > r.value + kPointTolerance || r.ci_high < r.value - kPointTolerance) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "corpus %d (n=%zu) %s CI [%.4f, %.4f] excludes %.4f", c, n, r.metric.c_str(),
                      r.ci_low, r.ci_high, r.value);
        o.fail(buf);
      }
    };
    const std::uint64_t seed = rng();
    check(metrics::bootstrap_ci(metrics::Bleu(), refs, hyps, 1000, seed),
          metrics::bootstrap_ci(metrics::Bleu(), refs, hyps, 1000, seed, 3));
    check(metrics::bootstrap_ci(metrics::Chrf(), refs, hyps, 1000, seed),
          metrics::bootstrap_ci(metrics::Chrf(), refs, hyps, 1000, seed, 2));
    check(metrics::bootstrap_ci(metrics::Wer(), refs, hyps, 1000, seed),
          metrics::bootstrap_ci(metrics::Wer(), refs, hyps, 1000, seed, 4));
  }
  for (std::size_t n : {2u, 7u, 50u}) {
    const std::vector<std::string> refs(n, "एक ही वाक्य बार बार ।"), hyps(n, "एक ही वाक्य ।");
    for (const auto& r : {metrics::bootstrap_ci(metrics::Bleu(), refs, hyps, 500, n),
                          metrics::bootstrap_ci(metrics::Chrf(), refs, hyps, 500, n),
                          metrics::bootstrap_ci(metrics::Wer(), refs, hyps, 500, n)}) {
      if (r.ci_low != r.value || r.ci_high != r.value) o.fail("non-zero width on constant corpus (" + r.metric + ")");
    }
  }
  if (o.pass) o.detail = "100 fuzzed corpora x {BLEU, chrF2, WER}, N=1000: " + std::to_string(checks) +
                         " CIs reproducible across runs and worker counts, all contain the point estimate; "
                         "constant corpora give zero width";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"mining-oracle-equivalence", mining_oracle},
      {"mining-determinism-performance", mining_determinism},
      {"split-invariants", split_invariants},
      {"contamination", contamination},
      {"metric-parity", metric_parity},
      {"statistics-arithmetic", stats_arithmetic},
      {"significance-sanity", significance},
      {"bootstrap-ci", bootstrap_ci},
      {"end-to-end-smoke", e2e_smoke},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    failures += o.pass ? 0 : 1;
  }
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << criteria.size() - failures << "/" << criteria.size()
            << std::endl;
  return failures ? 1 : 0;
}
