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

#include <gtest/gtest.h>

#include "anuvaad/pipeline/config.hpp"

namespace anuvaad::pipeline {
namespace {

using nlohmann::json;

ErrorCode code_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoFailure;
}

const json kBase = {{"seed", 5},
                    {"output_dir", "out"},
                    {"corpora", {{"hi", {{"corpus", "hi.jsonl"}, {"embeddings", "hi.emb"}}},
                                 {"bn", {{"corpus", "/abs/bn.jsonl"}}}}},
                    {"pairs", {"hi-bn"}}};

TEST(Config, DefaultsAndPaths) {
  const auto cfg = parse_config(kBase, "/data");
  EXPECT_EQ(cfg.seed, 5u);
  EXPECT_EQ(cfg.output_dir, "/data/out");
  EXPECT_EQ(cfg.paths("hi").corpus, "/data/hi.jsonl");
  EXPECT_EQ(cfg.paths("bn").corpus, "/abs/bn.jsonl");
  EXPECT_TRUE(cfg.paths("bn").embeddings.empty());
  EXPECT_EQ(cfg.mining.policy, MatchPolicy::kMutualBest);
  EXPECT_EQ(cfg.mining.histogram_edges.size(), 11u);
  EXPECT_EQ(cfg.split.spec.train_bins.size(), 5u);
  EXPECT_EQ(cfg.split.spec.train_bins[3].lower_bound, 0.68);
  EXPECT_EQ(cfg.n_resamples, 1000u);
  EXPECT_EQ(cfg.scoring.tokenizer, metrics::TokenizerKind::kIntl);
  EXPECT_EQ(cfg.pair_dir(cfg.pairs[0]), "/data/out/hi-bn");
}

TEST(Config, HashIgnoresOutputDirButNotSeed) {
  auto a = parse_config(kBase);
  json moved = kBase;
  moved["output_dir"] = "elsewhere";
  EXPECT_EQ(parse_config(moved).hash(), a.hash());
  const auto h = a.hash();
  EXPECT_EQ(h.size(), 16u);
  a.seed = 6;
  EXPECT_NE(a.hash(), h);
  json changed = kBase;
  changed["mining"] = {{"min_score", 0.2}};
  EXPECT_NE(parse_config(changed).hash(), h);
}

TEST(Config, StageSeedsAreStableAndDistinct) {
  const auto cfg = parse_config(kBase);
  const LangPair p{"hi", "bn"}, r{"bn", "hi"};
  EXPECT_EQ(cfg.stage_seed("split", p), derive_seed(5, "split:hi-bn"));
  EXPECT_EQ(cfg.stage_seed("split", p), xxh64("split:hi-bn", 5));
  EXPECT_NE(cfg.stage_seed("split", p), cfg.stage_seed("split", r));
}

TEST(Config, Rejections) {
  EXPECT_EQ(code_of(json::array()), ErrorCode::kInvalidConfig);
  json j = kBase;
  j["pairs"] = {"hi-te"};
  EXPECT_EQ(code_of(j), ErrorCode::kInvalidConfig);
  j = kBase;
  j["pairs"] = {"hibn"};
  EXPECT_EQ(code_of(j), ErrorCode::kInvalidConfig);
  j = kBase;
  j["split"] = {{"train_bins", {{{"name", "S1"}, {"min", 0.6}}, {{"name", "S2"}, {"min", 0.5}}}}};
  EXPECT_EQ(code_of(j), ErrorCode::kInvalidConfig);
  j = kBase;
  j["mining"] = {{"histogram_edges", {0.5, 0.4}}};
  EXPECT_EQ(code_of(j), ErrorCode::kInvalidConfig);
  j = kBase;
  j["scoring"] = {{"chrf_beta", 0}};
  EXPECT_EQ(code_of(j), ErrorCode::kInvalidConfig);
  j = kBase;
  j["seed"] = "seven";
  EXPECT_EQ(code_of(j), ErrorCode::kInvalidConfig);
}

TEST(Config, ParsePair) {
  EXPECT_EQ(parse_pair("hi-te"), (LangPair{"hi", "te"}));
  EXPECT_THROW(parse_pair("-te"), Error);
  EXPECT_THROW(parse_pair("hi-"), Error);
  EXPECT_THROW(parse_pair("a-b-c"), Error);
}

}  // namespace
}  // namespace anuvaad::pipeline
