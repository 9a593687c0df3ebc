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

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "anuvaad/corpus.hpp"
#include "anuvaad/hash.hpp"
#include "support/synth.hpp"

namespace anuvaad {
namespace {

template <typename F>
Error capture(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no anuvaad::Error thrown";
  return Error(ErrorCode::kInvalidArgument, "none");
}

std::string record(const std::string& id, const std::string& text, double dur = 1.5, const std::string& lang = "hi") {
  return nlohmann::json{{"id", id}, {"lang", lang}, {"text", text}, {"audio_ref", "a/" + id + ".wav"}, {"duration_s", dur}}
      .dump();
}

std::int64_t ulp_distance(float a, float b) {
  const auto key = [](float f) {
    std::int32_t i;
    std::memcpy(&i, &f, sizeof i);
    return i < 0 ? std::int64_t{INT32_MIN} - i : std::int64_t{i};
  };
  return std::llabs(key(a) - key(b));
}

Corpus parse(const std::string& text) {
  std::istringstream in(text);
  return parse_corpus(in);
}

TEST(Hash, KnownVectors) {
  EXPECT_EQ(to_hex(xxh64("")), "ef46db3751d8e999");
  EXPECT_EQ(to_hex(xxh64("abc")), "44bc2cf5ad770999");
  Xxh64 h;
  h.update("a");
  h.update("bc");
  EXPECT_EQ(h.digest(), xxh64("abc"));
}

TEST(LoadCorpus, KeepsLineOrder) {
  const Corpus c = parse(record("u3", "teen") + "\n" + record("u1", "ek") + "\n\n" + record("u2", "do") + "\n");
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.lang, "hi");
  EXPECT_EQ(c[0].id, "u3");
  EXPECT_EQ(c[1].id, "u1");
  EXPECT_EQ(c[2].id, "u2");
  EXPECT_DOUBLE_EQ(c[2].duration_s, 1.5);
}

TEST(LoadCorpus, DuplicateId) {
  const Error e = capture([] { parse(record("u1", "a") + "\n" + record("u1", "b") + "\n"); });
  EXPECT_EQ(e.code(), ErrorCode::kDuplicateId);
  EXPECT_EQ(e.key(), "u1");
}

TEST(LoadCorpus, MissingTextReportsLine) {
  const std::string bad = R"({"id":"u2","lang":"hi","audio_ref":"x","duration_s":1})";
  const Error e = capture([&] { parse(record("u1", "a") + "\n" + bad + "\n"); });
  EXPECT_EQ(e.code(), ErrorCode::kMalformedRecord);
  EXPECT_EQ(e.row(), 2u);
}

TEST(LoadCorpus, RejectsBadRecords) {
  EXPECT_EQ(capture([] { parse(record("u1", "   ")); }).code(), ErrorCode::kMalformedRecord);
  EXPECT_EQ(capture([] { parse(record("u1", "a", -1.0)); }).code(), ErrorCode::kMalformedRecord);
  EXPECT_EQ(capture([] { parse(record("u1", "a") + "\n" + record("u2", "b", 1.0, "bn")); }).row(), 2u);
  EXPECT_EQ(capture([] { parse("{not json}\n"); }).code(), ErrorCode::kMalformedRecord);
  EXPECT_EQ(capture([] { parse(R"({"id":"u","lang":"hi","text":"ÿ","audio_ref":"x","duration_s":"1"})"); }).code(),
            ErrorCode::kMalformedRecord);
  EXPECT_EQ(capture([] { parse("{\"id\":\"u\",\"lang\":\"hi\",\"text\":\"\xff\",\"audio_ref\":\"x\",\"duration_s\":1}"); })
                .code(),
            ErrorCode::kMalformedRecord);
}

TEST(LoadCorpus, MissingFileIsIoFailure) {
  const Error e = capture([] { load_corpus("/nonexistent/corpus.jsonl"); });
  EXPECT_EQ(e.code(), ErrorCode::kIoFailure);
  EXPECT_EQ(e.key(), "/nonexistent/corpus.jsonl");
}

TEST(LoadCorpus, SaveRoundTrip) {
  const auto dir = testing::scratch_dir("corpus_rt");
  Corpus c;
  c.lang = "te";
  c.records.push_back({"a", "te", "నమస్కారం ప్రపంచం", "x.wav", 2.25});
  c.records.push_back({"b", "te", "two \"quoted\" words", "y.wav", 0.0});
  save_corpus(c, dir / "c.jsonl");
  const Corpus back = load_corpus(dir / "c.jsonl");
  EXPECT_EQ(back.lang, "te");
  EXPECT_EQ(back.records, c.records);
}

TEST(Embeddings, RoundTripIsBitwise) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> u(-10.0f, 10.0f);
  const auto dir = testing::scratch_dir("emb_rt");
  for (std::size_t n : {0u, 1u, 2u, 17u}) {
    for (std::size_t d : {1u, 4u, 16u}) {
      std::vector<float> data(n * d);
      for (auto& x : data) x = u(rng);
      if (!data.empty()) data[0] = -0.0f;
      std::vector<std::string> ids;
      for (std::size_t i = 0; i < n; ++i) ids.push_back("utt-" + std::to_string(i) + "-ঘ");
      const EmbeddingMatrix m(n, d, data, ids);
      save_embeddings(m, dir / "m.emb");
      const EmbeddingMatrix back = load_embeddings(dir / "m.emb");
      EXPECT_TRUE(back == m) << n << "x" << d;
      EXPECT_EQ(back.rows(), n);
      EXPECT_EQ(back.dim(), d);
    }
  }
}

TEST(Embeddings, EmptyMatrixKeepsDimension) {
  const EmbeddingMatrix m(0, 16, {}, {});
  const std::string bytes = encode_embeddings(m);
  EXPECT_EQ(bytes.size(), 8u + 4 + 8 + 4 + 8);
  const EmbeddingMatrix back = decode_embeddings(bytes);
  EXPECT_EQ(back.rows(), 0u);
  EXPECT_EQ(back.dim(), 16u);
}

TEST(Embeddings, HeaderLayout) {
  const EmbeddingMatrix m(1, 2, {1.0f, -2.0f}, {"ab"});
  const std::string b = encode_embeddings(m);
  ASSERT_EQ(b.size(), 8u + 4 + 8 + 4 + 2 + 2 + 8 + 8);
  EXPECT_EQ(b.substr(0, 8), "ANUVEMB1");
  EXPECT_EQ(b.substr(8, 4), std::string("\x01\x00\x00\x00", 4));
  EXPECT_EQ(b.substr(12, 8), std::string("\x01\0\0\0\0\0\0\0", 8));
  EXPECT_EQ(b.substr(20, 4), std::string("\x02\0\0\0", 4));
  EXPECT_EQ(b.substr(24, 4), std::string("\x02\0ab", 4));
  EXPECT_EQ(b.substr(28, 4), std::string("\x00\x00\x80\x3f", 4));
  EXPECT_EQ(b.substr(32, 4), std::string("\x00\x00\x00\xc0", 4));
  std::uint64_t stored = 0;
  for (int i = 7; i >= 0; --i) stored = (stored << 8) | static_cast<unsigned char>(b[36 + i]);
  EXPECT_EQ(stored, xxh64(std::string_view(b).substr(0, 36)));
}

TEST(Embeddings, DetectsCorruption) {
  const EmbeddingMatrix m(2, 3, {1, 2, 3, 4, 5, 6}, {"x", "y"});
  const std::string good = encode_embeddings(m);

  std::string bad = good;
  bad[0] = 'B';
  EXPECT_EQ(capture([&] { decode_embeddings(bad); }).code(), ErrorCode::kBadMagic);

  bad = good;
  bad[8] = 2;
  EXPECT_EQ(capture([&] { decode_embeddings(bad); }).code(), ErrorCode::kUnsupportedVersion);

  bad = good;
  bad[30] ^= 0x01;
  EXPECT_EQ(capture([&] { decode_embeddings(bad); }).code(), ErrorCode::kChecksumMismatch);

  EXPECT_EQ(capture([&] { decode_embeddings(good.substr(0, good.size() - 3)); }).code(), ErrorCode::kTruncated);
  EXPECT_EQ(capture([&] { decode_embeddings(good.substr(0, 5)); }).code(), ErrorCode::kBadMagic);
}

TEST(Embeddings, NonFiniteValueNamesCell) {
  std::vector<float> data(8 * 4, 0.5f);
  data[5 * 4 + 2] = std::numeric_limits<float>::quiet_NaN();
  std::vector<std::string> ids;
  for (int i = 0; i < 8; ++i) ids.push_back("u" + std::to_string(i));
  const std::string bytes = encode_embeddings(EmbeddingMatrix(8, 4, data, ids));
  const Error e = capture([&] { decode_embeddings(bytes); });
  EXPECT_EQ(e.code(), ErrorCode::kNonFiniteValue);
  EXPECT_EQ(e.row(), 5u);
  EXPECT_EQ(e.col(), 2u);
}

TEST(Embeddings, AlignmentWithCorpus) {
  const auto dir = testing::scratch_dir("emb_align");
  Corpus c;
  c.lang = "hi";
  c.records = {{"a", "hi", "x", "", 1}, {"b", "hi", "y", "", 1}};
  save_embeddings(EmbeddingMatrix(2, 2, {1, 0, 0, 1}, {"a", "b"}), dir / "ok.emb");
  save_embeddings(EmbeddingMatrix(2, 2, {1, 0, 0, 1}, {"a", "c"}), dir / "ids.emb");
  save_embeddings(EmbeddingMatrix(1, 2, {1, 0}, {"a"}), dir / "rows.emb");
  EXPECT_NO_THROW(load_embeddings(dir / "ok.emb", c));
  const Error e = capture([&] { load_embeddings(dir / "ids.emb", c); });
  EXPECT_EQ(e.code(), ErrorCode::kIdMismatch);
  EXPECT_EQ(e.row(), 1u);
  EXPECT_EQ(capture([&] { load_embeddings(dir / "rows.emb", c); }).code(), ErrorCode::kDimensionMismatch);
}

TEST(Embeddings, UnwritablePathIsIoFailure) {
  const EmbeddingMatrix m(1, 1, {1.0f}, {"a"});
  EXPECT_EQ(capture([&] { save_embeddings(m, "/nonexistent/dir/x.emb"); }).code(), ErrorCode::kIoFailure);
  EXPECT_EQ(capture([&] { load_embeddings("/nonexistent/dir/x.emb"); }).code(), ErrorCode::kIoFailure);
}

TEST(Normalize, HandExample) {
  const EmbeddingMatrix m = normalize_rows(EmbeddingMatrix(2, 2, {3, 4, 1, 0}, {"a", "b"}));
  EXPECT_FLOAT_EQ(m.row(0)[0], 0.6f);
  EXPECT_FLOAT_EQ(m.row(0)[1], 0.8f);
  EXPECT_EQ(m.row(1)[0], 1.0f);
  EXPECT_EQ(m.row(1)[1], 0.0f);
}

TEST(Normalize, ZeroRow) {
  const Error e = capture([] { normalize_rows(EmbeddingMatrix(3, 2, {1, 0, 0, 0, 0, 1}, {"a", "b", "c"})); });
  EXPECT_EQ(e.code(), ErrorCode::kZeroNormRow);
  EXPECT_EQ(e.row(), 1u);
}

TEST(Normalize, UnitNormAndIdempotentWithinOneUlp) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> u(-100.0f, 100.0f);
  for (std::size_t d : {2u, 64u, 1024u}) {
    std::vector<float> data(50 * d);
    for (auto& x : data) x = u(rng);
    std::vector<std::string> ids(50, "");
    for (int i = 0; i < 50; ++i) ids[i] = std::to_string(i);
    const EmbeddingMatrix once = normalize_rows(EmbeddingMatrix(50, d, data, ids));
    const EmbeddingMatrix twice = normalize_rows(once);
    for (std::size_t i = 0; i < 50; ++i) {
      double sq = 0;
      for (float v : once.row(i)) sq += double(v) * v;
      EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-5);
      for (std::size_t k = 0; k < d; ++k) {
        EXPECT_LE(ulp_distance(once.row(i)[k], twice.row(i)[k]), 1) << i << "," << k;
      }
    }
  }
}

}  // namespace
}  // namespace anuvaad
