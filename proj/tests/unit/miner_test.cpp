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

#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "anuvaad/miner.hpp"
#include "support/synth.hpp"

namespace anuvaad {
namespace {

using testing::oracle_cosine;
using testing::random_unit_matrix;

EmbeddingMatrix matrix(std::size_t n, std::size_t d, std::vector<float> data) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("id" + std::to_string(i));
  return normalize_rows(EmbeddingMatrix(n, d, std::move(data), std::move(ids)));
}

// Scalar triple loop: full score table, then each policy by definition.
struct Oracle {
  std::vector<std::vector<float>> s;

  Oracle(const EmbeddingMatrix& a, const EmbeddingMatrix& b) : s(a.rows(), std::vector<float>(b.rows())) {
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < b.rows(); ++j) s[i][j] = oracle_cosine(a.row(i), b.row(j));
  }

  std::vector<Neighbor> top(std::size_t i, std::size_t k) const {
    std::vector<Neighbor> all;
    for (std::size_t j = 0; j < s[i].size(); ++j) all.push_back({j, s[i][j]});
    std::stable_sort(all.begin(), all.end(), [](const Neighbor& x, const Neighbor& y) { return x.score > y.score; });
    all.resize(k);
    return all;
  }
  std::size_t best_tgt(std::size_t i) const { return top(i, 1)[0].idx; }
  std::size_t best_src(std::size_t j) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i][j] > s[best][j]) best = i;
    return best;
  }
  std::vector<MinedPair> mine(double min_score, MatchPolicy policy) const {
    std::vector<MinedPair> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (policy == MatchPolicy::kAllAbove) {
        for (std::size_t j = 0; j < s[i].size(); ++j)
          if (s[i][j] >= min_score) out.push_back({i, j, s[i][j]});
        continue;
      }
      if (s[i].empty()) continue;
      const std::size_t j = best_tgt(i);
      if (s[i][j] < min_score) continue;
      if (policy == MatchPolicy::kMutualBest && best_src(j) != i) continue;
      out.push_back({i, j, s[i][j]});
    }
    return out;
  }
};

void expect_same_pairs(const std::vector<MinedPair>& got, const std::vector<MinedPair>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t k = 0; k < got.size(); ++k) {
    EXPECT_EQ(got[k].src_idx, want[k].src_idx) << k;
    EXPECT_EQ(got[k].tgt_idx, want[k].tgt_idx) << k;
    EXPECT_NEAR(got[k].score, want[k].score, 1e-6) << k;
  }
}

TEST(Cosine, Examples) {
  const std::vector<float> a{0.6f, 0.8f}, b{0.8f, 0.6f}, x{1, 0}, y{0, 1};
  EXPECT_NEAR(cosine(a, b), 0.96, 1e-6);
  EXPECT_EQ(cosine(x, y), 0.0f);
  EXPECT_EQ(cosine(x, x), 1.0f);
  EXPECT_THROW(cosine(a, std::vector<float>{1, 0, 0}), Error);
}

TEST(Cosine, ClampsSmallExcursionAndRejectsLarge) {
  const std::vector<float> u{1.00001f, 0};
  EXPECT_EQ(cosine(u, u), 1.0f);
  const std::vector<float> v{1.01f, 0};
  try {
    cosine(v, v);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kScoreOutOfRange);
  }
}

TEST(TopK, SelfMatchRanksFirst) {
  std::mt19937_64 rng(1);
  const auto src = random_unit_matrix(20, 16, rng);
  const auto nb = top_k(src, src, 3);
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_EQ(nb[i][0].idx, i);
    EXPECT_NEAR(nb[i][0].score, 1.0, 1e-6);
    EXPECT_EQ(nb[i].size(), 3u);
  }
}

TEST(TopK, TiesPreferLowerIndex) {
  const auto src = matrix(1, 2, {1, 0});
  const auto tgt = matrix(4, 2, {0, 1, 0.6f, 0.8f, 0.6f, 0.8f, 0.6f, -0.8f});
  const auto nb = top_k(src, tgt, 4);
  ASSERT_EQ(nb[0].size(), 4u);
  EXPECT_EQ(nb[0][0].idx, 1u);
  EXPECT_EQ(nb[0][1].idx, 2u);
  EXPECT_EQ(nb[0][2].idx, 3u);
  EXPECT_EQ(nb[0][3].idx, 0u);
}

TEST(TopK, SmallBruteForce) {
  const auto src = matrix(4, 3, {1, 2, 3, -1, 0.5f, 2, 0, 0, 1, 3, -2, 1});
  const auto tgt = matrix(5, 3, {1, 1, 1, 2, 2, 3, -1, 0, 0, 0.5f, -1, 2, 0, 1, 0});
  const Oracle o(src, tgt);
  const auto nb = top_k(src, tgt, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto want = o.top(i, 2);
    ASSERT_EQ(nb[i].size(), 2u);
    for (std::size_t r = 0; r < 2; ++r) {
      EXPECT_EQ(nb[i][r].idx, want[r].idx);
      EXPECT_EQ(nb[i][r].score, want[r].score);
    }
  }
}

TEST(TopK, Errors) {
  const auto a = matrix(2, 2, {1, 0, 0, 1});
  const auto b = matrix(2, 3, {1, 0, 0, 0, 1, 0});
  try {
    top_k(a, a, 3);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kKTooLarge);
  }
  try {
    top_k(a, b, 1);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(MinePairs, MutualBestHandExample) {
  // cos(s0,t0)=0.6 cos(s0,t1)=0.8; cos(s1,t0)=1 cos(s1,t1)=0; cos(s2,t0)=0.8 cos(s2,t1)=0.96.
  const auto src = matrix(3, 2, {0.6f, 0.8f, 1, 0, 0.8f, 0.6f});
  const auto tgt = matrix(2, 2, {1, 0, 0.8f, 0.6f});
  const auto pairs = mine_pairs(src, tgt, 0.0, MatchPolicy::kMutualBest);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].src_idx, 1u);
  EXPECT_EQ(pairs[0].tgt_idx, 0u);
  EXPECT_EQ(pairs[1].src_idx, 2u);
  EXPECT_EQ(pairs[1].tgt_idx, 1u);
  EXPECT_NEAR(pairs[1].score, 1.0, 1e-6);

  const auto fwd = mine_pairs(src, tgt, 0.0, MatchPolicy::kForwardBest);
  ASSERT_EQ(fwd.size(), 3u);
  EXPECT_EQ(fwd[0].tgt_idx, 1u);
}

TEST(MinePairs, ExactCopyUnderEveryPolicy) {
  std::mt19937_64 rng(4);
  const auto src = random_unit_matrix(10, 32, rng);
  auto tgt_rand = random_unit_matrix(8, 32, rng);
  std::vector<float> data(tgt_rand.data().begin(), tgt_rand.data().end());
  std::copy(src.row(3).begin(), src.row(3).end(), data.begin() + 5 * 32);
  const EmbeddingMatrix tgt(8, 32, data, tgt_rand.ids());
  for (auto policy : {MatchPolicy::kMutualBest, MatchPolicy::kForwardBest, MatchPolicy::kAllAbove}) {
    const auto pairs = mine_pairs(src, tgt, 0.5, policy);
    const auto it = std::find_if(pairs.begin(), pairs.end(), [](const MinedPair& p) { return p.src_idx == 3; });
    ASSERT_NE(it, pairs.end()) << to_string(policy);
    EXPECT_EQ(it->tgt_idx, 5u);
    EXPECT_EQ(it->score, 1.0);
  }
}

TEST(MinePairs, HighThresholdOnRandomVectorsIsEmpty) {
  std::mt19937_64 rng(5);
  const auto a = random_unit_matrix(50, 64, rng);
  const auto b = random_unit_matrix(60, 64, rng);
  for (auto policy : {MatchPolicy::kMutualBest, MatchPolicy::kForwardBest, MatchPolicy::kAllAbove}) {
    EXPECT_TRUE(mine_pairs(a, b, 0.99, policy).empty());
  }
}

TEST(MinePairs, MatchesOracleOnRandomCorpora) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t n = 1 + rng() % 70, m = 1 + rng() % 70, d = trial % 2 ? 3 : 24;
    const auto a = random_unit_matrix(n, d, rng);
    const auto b = random_unit_matrix(m, d, rng);
    const Oracle o(a, b);
    for (auto policy : {MatchPolicy::kMutualBest, MatchPolicy::kForwardBest, MatchPolicy::kAllAbove}) {
      for (double t : {-1.0, 0.1, 0.5}) {
        expect_same_pairs(mine_pairs(a, b, t, policy, {7, 2}), o.mine(t, policy));
      }
    }
  }
}

TEST(MinePairs, MutualBestIsSymmetric) {
  std::mt19937_64 rng(7);
  const auto a = random_unit_matrix(80, 8, rng);
  const auto b = random_unit_matrix(90, 8, rng);
  auto ab = mine_pairs(a, b, 0.0, MatchPolicy::kMutualBest);
  auto ba = mine_pairs(b, a, 0.0, MatchPolicy::kMutualBest);
  for (auto& p : ba) std::swap(p.src_idx, p.tgt_idx);
  std::sort(ba.begin(), ba.end(), [](const MinedPair& x, const MinedPair& y) { return x.src_idx < y.src_idx; });
  expect_same_pairs(ab, ba);
  for (std::size_t k = 0; k < ab.size(); ++k) EXPECT_EQ(ab[k].score, ba[k].score);
}

TEST(MinePairs, DeterministicAcrossWorkersAndBlocks) {
  std::mt19937_64 rng(8);
  const auto a = random_unit_matrix(700, 48, rng);
  const auto b = random_unit_matrix(650, 48, rng);
  for (auto policy : {MatchPolicy::kMutualBest, MatchPolicy::kForwardBest, MatchPolicy::kAllAbove}) {
    const auto ref = mine_pairs(a, b, 0.2, policy, {256, 1});
    std::ostringstream ref_tsv;
    write_pairs_tsv(ref_tsv, ref, a.ids(), b.ids());
    for (unsigned w : {1u, 2u, 8u}) {
      for (std::size_t bs : {32u, 256u, 4096u}) {
        const auto got = mine_pairs(a, b, 0.2, policy, {bs, w});
        std::ostringstream tsv;
        write_pairs_tsv(tsv, got, a.ids(), b.ids());
        EXPECT_EQ(tsv.str(), ref_tsv.str()) << to_string(policy) << " w=" << w << " bs=" << bs;
      }
    }
    const auto nb_ref = top_k(a, b, 5, {256, 1});
    const auto nb = top_k(a, b, 5, {32, 8});
    for (std::size_t i = 0; i < a.rows(); ++i) {
      for (std::size_t r = 0; r < 5; ++r) {
        EXPECT_EQ(nb[i][r].idx, nb_ref[i][r].idx);
        EXPECT_EQ(nb[i][r].score, nb_ref[i][r].score);
      }
    }
  }
}

TEST(Histogram, Examples) {
  const std::vector<MinedPair> pairs{{0, 0, 0.55}, {1, 1, 0.65}, {2, 2, 0.75}};
  const std::vector<double> edges{0.5, 0.6, 0.7, 0.8};
  const Histogram h = score_histogram(pairs, edges);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_EQ(h.total(), 3u);

  const Histogram empty = score_histogram({}, edges);
  EXPECT_EQ(empty.counts, (std::vector<std::size_t>{0, 0, 0}));

  const std::vector<MinedPair> edge_pairs{{0, 0, 0.6}, {0, 0, 0.7}, {0, 0, 0.2}};
  const Histogram hb = score_histogram(edge_pairs, std::vector<double>{0.5, 0.6, 0.7});
  EXPECT_EQ(hb.counts, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(hb.overflow, 1u);
  EXPECT_EQ(hb.underflow, 1u);
  EXPECT_EQ(hb.total(), 3u);
}

TEST(Histogram, BadEdges) {
  for (const std::vector<double>& edges : {std::vector<double>{0.5}, std::vector<double>{0.5, 0.5},
                                           std::vector<double>{0.6, 0.5}}) {
    try {
      score_histogram({}, edges);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kBadEdges);
    }
  }
}

TEST(Histogram, DefaultEdges) {
  const auto edges = uniform_edges(0.5, 1.0, 0.05);
  ASSERT_EQ(edges.size(), 11u);
  EXPECT_EQ(edges[2], 0.6);
  EXPECT_EQ(edges[10], 1.0);
  const Histogram h = score_histogram(std::vector<MinedPair>{{0, 0, 0.6}, {0, 0, 0.65}}, edges);
  EXPECT_EQ(h.counts[2], 1u);
  EXPECT_EQ(h.counts[3], 1u);
}

TEST(PairsTsv, SortedSixDecimalsAndRoundTrip) {
  Corpus src, tgt;
  src.lang = "hi";
  tgt.lang = "bn";
  for (const char* id : {"b", "a", "c"}) src.records.push_back({id, "hi", "t", "", 1});
  for (const char* id : {"y", "x"}) tgt.records.push_back({id, "bn", "t", "", 1});
  const std::vector<MinedPair> pairs{{0, 0, 0.123456789}, {1, 1, 0.5}, {2, 0, -0.25}};
  std::ostringstream out;
  write_pairs_tsv(out, pairs, {"b", "a", "c"}, {"y", "x"}, "note");
  EXPECT_EQ(out.str(), "# note\na\tx\t0.500000\nb\ty\t0.123457\nc\ty\t-0.250000\n");
  std::istringstream in(out.str());
  const auto back = read_pairs_tsv(in, src, tgt);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0].src_idx, 0u);
  EXPECT_EQ(back[0].score, 0.123457);
  EXPECT_EQ(back[1].src_idx, 1u);
  EXPECT_EQ(back[1].tgt_idx, 1u);
}

}  // namespace
}  // namespace anuvaad
