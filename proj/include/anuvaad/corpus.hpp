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

// Utterance corpora (JSONL) and sentence-embedding matrices (ANUVEMB1).
//
// ANUVEMB1 layout, all integers little-endian:
//
//   offset  size  field
//   0       8     magic "ANUVEMB1"
//   8       4     u32 version (= 1)
//   12      8     u64 n (rows)
//   20      4     u32 d (columns)
//   24      ...   n ids, each u16 byte length followed by UTF-8 bytes
//   ...     4nd   n*d IEEE-754 binary32 values, row-major
//   ...     8     u64 checksum
//
// The checksum is XXH64 with seed 0 over every byte that precedes it, magic
// included.
//
// Ingestion applies no sentence splitting or length filtering: one JSONL line
// is one utterance and one embedding row.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "anuvaad/error.hpp"
#include "anuvaad/hash.hpp"
#include "anuvaad/text.hpp"

namespace anuvaad {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
static_assert(std::numeric_limits<float>::is_iec559, "binary32 floats required");

struct UtteranceRecord {
  std::string id;
  std::string lang;
  std::string text;
  std::string audio_ref;
  double duration_s = 0.0;

  friend bool operator==(const UtteranceRecord&, const UtteranceRecord&) = default;
};

struct Corpus {
  std::string lang;
  std::vector<UtteranceRecord> records;

  std::size_t size() const noexcept { return records.size(); }
  const UtteranceRecord& operator[](std::size_t i) const { return records[i]; }
};

/// Row-major n x d binary32 matrix with one id per row.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t n, std::size_t d, std::vector<float> data, std::vector<std::string> ids)
      : n_(n), d_(d), data_(std::move(data)), ids_(std::move(ids)) {
    if (data_.size() != n_ * d_) {
      throw Error(ErrorCode::kDimensionMismatch, "data size " + std::to_string(data_.size()) +
                                                     " != n*d = " + std::to_string(n_ * d_));
    }
    if (ids_.size() != n_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "id count " + std::to_string(ids_.size()) + " != n = " + std::to_string(n_));
    }
  }

  std::size_t rows() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }
  std::span<const float> row(std::size_t i) const noexcept { return {data_.data() + i * d_, d_}; }
  std::span<float> row(std::size_t i) noexcept { return {data_.data() + i * d_, d_}; }
  std::span<const float> data() const noexcept { return data_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
    // Bitwise, so NaN payloads and signed zeros compare as stored.
    return a.n_ == b.n_ && a.d_ == b.d_ && a.ids_ == b.ids_ &&
           std::memcmp(a.data_.data(), b.data_.data(), a.data_.size() * sizeof(float)) == 0;
  }

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<float> data_;
  std::vector<std::string> ids_;
};

// ---------------------------------------------------------------------------
// Corpus JSONL

namespace detail {

inline UtteranceRecord parse_record(std::string_view line, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kMalformedRecord, "line " + std::to_string(line_no) + ": " + e.what(), line_no);
  }
  const auto fail = [&](const std::string& why) {
    return Error(ErrorCode::kMalformedRecord, "line " + std::to_string(line_no) + ": " + why, line_no);
  };
  if (!j.is_object()) throw fail("not a JSON object");
  const auto string_field = [&](const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw fail(std::string("missing field '") + key + "'");
    if (!it->is_string()) throw fail(std::string("field '") + key + "' is not a string");
    return it->get<std::string>();
  };

  UtteranceRecord rec;
  rec.id = string_field("id");
  rec.lang = string_field("lang");
  rec.text = string_field("text");
  rec.audio_ref = string_field("audio_ref");
  auto dur = j.find("duration_s");
  if (dur == j.end()) throw fail("missing field 'duration_s'");
  if (!dur->is_number()) throw fail("field 'duration_s' is not a number");
  rec.duration_s = dur->get<double>();

  if (rec.id.empty()) throw fail("empty id");
  if (!std::isfinite(rec.duration_s) || rec.duration_s < 0.0) throw fail("duration_s must be finite and >= 0");
  try {
    if (text::trim(rec.text).empty()) throw fail("text is empty after trimming");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidUtf8) throw fail("text is not valid UTF-8");
    throw;
  }
  return rec;
}

}  // namespace detail

inline Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    UtteranceRecord rec = detail::parse_record(line, line_no);
    if (corpus.records.empty()) {
      corpus.lang = rec.lang;
    } else if (rec.lang != corpus.lang) {
      throw Error(ErrorCode::kMalformedRecord,
                  "line " + std::to_string(line_no) + ": lang '" + rec.lang + "' differs from corpus lang '" +
                      corpus.lang + "'",
                  line_no);
    }
    if (!seen.insert(rec.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate id '" + rec.id + "'", line_no, Error::npos, rec.id);
    }
    corpus.records.push_back(std::move(rec));
  }
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "read error");
  return corpus;
}

inline Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string(), Error::npos, Error::npos, path.string());
  return parse_corpus(in);
}

inline nlohmann::ordered_json to_json(const UtteranceRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["lang"] = r.lang;
  j["text"] = r.text;
  j["audio_ref"] = r.audio_ref;
  j["duration_s"] = r.duration_s;
  return j;
}

inline void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string(), Error::npos, Error::npos, path.string());
  for (const auto& r : corpus.records) out << to_json(r).dump() << '\n';
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string(), Error::npos, Error::npos, path.string());
}

// ---------------------------------------------------------------------------
// ANUVEMB1

inline constexpr std::string_view kEmbeddingMagic = "ANUVEMB1";
inline constexpr std::uint32_t kEmbeddingVersion = 1;

namespace detail {

class LeWriter {
 public:
  void bytes(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  template <typename T>
  void uint(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f32(float f) { uint(std::bit_cast<std::uint32_t>(f)); }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

class LeReader {
 public:
  explicit LeReader(std::string_view buf) : buf_(buf) {}
  std::string_view bytes(std::size_t n) {
    need(n);
    auto out = buf_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  template <typename T>
  T uint() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return v;
  }
  float f32() { return std::bit_cast<float>(uint<std::uint32_t>()); }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return buf_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) throw Error(ErrorCode::kTruncated, "embedding file truncated at byte " + std::to_string(pos_));
  }
  std::string_view buf_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Serializes `m` to ANUVEMB1 bytes.
inline std::string encode_embeddings(const EmbeddingMatrix& m) {
  detail::LeWriter w;
  w.bytes(kEmbeddingMagic.data(), kEmbeddingMagic.size());
  w.uint<std::uint32_t>(kEmbeddingVersion);
  w.uint<std::uint64_t>(m.rows());
  if (m.dim() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kDimensionMismatch, "dimension does not fit in u32");
  }
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(m.dim()));
  for (const auto& id : m.ids()) {
    if (id.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(ErrorCode::kInvalidArgument, "id longer than 65535 bytes");
    }
    w.uint<std::uint16_t>(static_cast<std::uint16_t>(id.size()));
    w.bytes(id.data(), id.size());
  }
  for (float f : m.data()) w.f32(f);
  const std::uint64_t checksum = xxh64(w.buffer());
  w.uint<std::uint64_t>(checksum);
  return std::move(w.buffer());
}

/// Parses ANUVEMB1 bytes, verifying magic, version, checksum and finiteness.
inline EmbeddingMatrix decode_embeddings(std::string_view bytes) {
  detail::LeReader r(bytes);
  if (bytes.size() < kEmbeddingMagic.size() || r.bytes(kEmbeddingMagic.size()) != kEmbeddingMagic) {
    throw Error(ErrorCode::kBadMagic, "not an ANUVEMB1 file");
  }
  const auto version = r.uint<std::uint32_t>();
  if (version != kEmbeddingVersion) {
    throw Error(ErrorCode::kUnsupportedVersion, "version " + std::to_string(version));
  }
  const auto n = r.uint<std::uint64_t>();
  const auto d = r.uint<std::uint32_t>();
  // Each row needs at least 2 id-length bytes and 4*d value bytes.
  if (n > r.remaining() / (2 + 4ULL * d)) throw Error(ErrorCode::kTruncated, "row count exceeds file size");

  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto len = r.uint<std::uint16_t>();
    ids.emplace_back(r.bytes(len));
  }
  std::vector<float> data(n * d);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = r.f32();

  const std::size_t payload_end = r.pos();
  const auto stored = r.uint<std::uint64_t>();
  if (r.remaining() != 0) throw Error(ErrorCode::kMalformedRecord, "trailing bytes after checksum");
  if (xxh64(bytes.substr(0, payload_end)) != stored) {
    throw Error(ErrorCode::kChecksumMismatch, "payload checksum does not match");
  }
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t col = 0; col < d; ++col) {
      if (!std::isfinite(data[row * d + col])) {
        throw Error(ErrorCode::kNonFiniteValue,
                    "row " + std::to_string(row) + " col " + std::to_string(col) + " is not finite", row, col);
      }
    }
  }
  return EmbeddingMatrix(n, d, std::move(data), std::move(ids));
}

inline void save_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  const std::string bytes = encode_embeddings(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string() + " for writing", Error::npos, Error::npos, path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string(), Error::npos, Error::npos, path.string());
}

inline EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string(), Error::npos, Error::npos, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "read failed: " + path.string(), Error::npos, Error::npos, path.string());
  return decode_embeddings(ss.view());
}

/// Checks that `m` rows line up with `expected` records, id by id.
inline void check_alignment(const EmbeddingMatrix& m, const Corpus& expected) {
  if (m.rows() != expected.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding rows " + std::to_string(m.rows()) +
                                                   " != corpus records " + std::to_string(expected.size()));
  }
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (m.ids()[i] != expected.records[i].id) {
      throw Error(ErrorCode::kIdMismatch,
                  "row " + std::to_string(i) + ": id '" + m.ids()[i] + "' != corpus id '" + expected.records[i].id + "'",
                  i);
    }
  }
}

inline EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const Corpus& expected) {
  EmbeddingMatrix m = load_embeddings(path);
  check_alignment(m, expected);
  return m;
}

/// Scales every row to unit L2 norm. Norms are accumulated in binary64.
inline EmbeddingMatrix normalize_rows(EmbeddingMatrix m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    double sq = 0.0;
    for (float v : row) sq += static_cast<double>(v) * v;
    const double norm = std::sqrt(sq);
    if (norm == 0.0 || !std::isfinite(norm)) {
      throw Error(ErrorCode::kZeroNormRow, "row " + std::to_string(i) + " has zero norm", i);
    }
    for (float& v : row) v = static_cast<float>(v / norm);
  }
  return m;
}

}  // namespace anuvaad
