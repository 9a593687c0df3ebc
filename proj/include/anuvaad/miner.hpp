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

// Exact cross-lingual similarity search over unit-normalized embeddings.
//
// Every score is the binary64 sum of binary32 products taken in column
// order, rounded once to binary32. Products of two binary32 values are exact
// in binary64, so the only rounding is in the running sum; a plain scalar
// loop over columns reproduces every score bit for bit, whatever the tiling
// or thread count.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "anuvaad/corpus.hpp"
#include "anuvaad/error.hpp"
#include "anuvaad/parallel.hpp"

namespace anuvaad {

/// Scores whose raw dot product leaves [-1 - tol, 1 + tol] indicate rows that
/// were not normalized; they are rejected instead of clamped.
inline constexpr double kScoreExcursionTolerance = 1e-4;

enum class MatchPolicy { kMutualBest, kForwardBest, kAllAbove };

inline constexpr std::string_view to_string(MatchPolicy p) {
  switch (p) {
    case MatchPolicy::kMutualBest: return "mutual_best";
    case MatchPolicy::kForwardBest: return "forward_best";
    case MatchPolicy::kAllAbove: return "all_above";
  }
  return "unknown";
}

inline MatchPolicy parse_policy(std::string_view s) {
  if (s == "mutual_best") return MatchPolicy::kMutualBest;
  if (s == "forward_best") return MatchPolicy::kForwardBest;
  if (s == "all_above") return MatchPolicy::kAllAbove;
  throw Error(ErrorCode::kInvalidArgument, "unknown match policy '" + std::string(s) + "'");
}

struct MinedPair {
  std::size_t src_idx = 0;
  std::size_t tgt_idx = 0;
  double score = 0.0;

  friend bool operator==(const MinedPair&, const MinedPair&) = default;
};

struct Neighbor {
  std::size_t idx = 0;
  float score = 0.0f;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Higher score first, then lower index.
inline constexpr bool ranks_before(float score_a, std::size_t idx_a, float score_b, std::size_t idx_b) noexcept {
  return score_a > score_b || (score_a == score_b && idx_a < idx_b);
}

struct SearchOptions {
  std::size_t block_size = 256;
  unsigned workers = 1;  // 0 = hardware concurrency
};

namespace detail {

inline float finish_score(double raw) {
  if (!(std::abs(raw) <= 1.0 + kScoreExcursionTolerance)) {
    throw Error(ErrorCode::kScoreOutOfRange,
                "dot product " + std::to_string(raw) + " outside [-1, 1]; are the rows normalized?");
  }
  return static_cast<float>(std::clamp(raw, -1.0, 1.0));
}

}  // namespace detail

/// Cosine of two unit vectors: their dot product clamped to [-1, 1].
inline float cosine(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vector sizes " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) acc += static_cast<double>(u[k]) * static_cast<double>(v[k]);
  return detail::finish_score(acc);
}

namespace detail {

// Bounded list of the k best neighbors, kept sorted by ranks_before.
class TopKBuffer {
 public:
  explicit TopKBuffer(std::size_t k) : k_(k) { items_.reserve(k); }

  void offer(std::size_t idx, float score) {
    if (items_.size() == k_) {
      const Neighbor& worst = items_.back();
      if (!ranks_before(score, idx, worst.score, worst.idx)) return;
      items_.pop_back();
    }
    auto pos = std::upper_bound(items_.begin(), items_.end(), Neighbor{idx, score},
                                [](const Neighbor& a, const Neighbor& b) {
                                  return ranks_before(a.score, a.idx, b.score, b.idx);
                                });
    items_.insert(pos, Neighbor{idx, score});
  }

  std::vector<Neighbor> take() && { return std::move(items_); }

 private:
  std::size_t k_;
  std::vector<Neighbor> items_;
};

struct Best {
  std::size_t idx = std::numeric_limits<std::size_t>::max();
  float score = -std::numeric_limits<float>::infinity();

  bool empty() const noexcept { return idx == std::numeric_limits<std::size_t>::max(); }
  void offer(std::size_t i, float s) noexcept {
    if (empty() || ranks_before(s, i, score, idx)) {
      idx = i;
      score = s;
    }
  }
};

inline std::vector<double> widen(std::span<const float> v) { return {v.begin(), v.end()}; }

// Computes every score of a source block against a target block and hands
// them to `sink(i, j, score)` in row-major order (i outer, j inner).
//
// Targets are transposed into column-major double panels so the innermost
// loop runs over consecutive targets; each individual score is still summed
// over k in ascending order.
class ScoreKernel {
 public:
  ScoreKernel(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt)
      : d_(src.dim()), src_(widen(src.data())), tgt_(widen(tgt.data())), n_tgt_(tgt.rows()) {}

  template <typename Sink>
  void run(std::size_t s0, std::size_t s1, std::size_t t0, std::size_t t1, std::vector<double>& panel,
           Sink&& sink) const {
    const std::size_t width = t1 - t0;
    panel.resize(d_ * width);
    for (std::size_t j = 0; j < width; ++j) {
      const double* row = tgt_.data() + (t0 + j) * d_;
      for (std::size_t k = 0; k < d_; ++k) panel[k * width + j] = row[k];
    }

    constexpr std::size_t kRows = 4;
    constexpr std::size_t kCols = 8;
    double acc[kRows][kCols];
    for (std::size_t i0 = s0; i0 < s1; i0 += kRows) {
      const std::size_t rows = std::min(kRows, s1 - i0);
      for (std::size_t j0 = 0; j0 < width; j0 += kCols) {
        const std::size_t cols = std::min(kCols, width - j0);
        for (auto& r : acc) std::fill(std::begin(r), std::end(r), 0.0);
        if (rows == kRows && cols == kCols) {
          const double* a0 = src_.data() + (i0 + 0) * d_;
          const double* a1 = src_.data() + (i0 + 1) * d_;
          const double* a2 = src_.data() + (i0 + 2) * d_;
          const double* a3 = src_.data() + (i0 + 3) * d_;
          for (std::size_t k = 0; k < d_; ++k) {
            const double* b = panel.data() + k * width + j0;
            const double x0 = a0[k], x1 = a1[k], x2 = a2[k], x3 = a3[k];
            for (std::size_t c = 0; c < kCols; ++c) {
              acc[0][c] += x0 * b[c];
              acc[1][c] += x1 * b[c];
              acc[2][c] += x2 * b[c];
              acc[3][c] += x3 * b[c];
            }
          }
        } else {
          for (std::size_t r = 0; r < rows; ++r) {
            const double* a = src_.data() + (i0 + r) * d_;
            for (std::size_t k = 0; k < d_; ++k) {
              const double* b = panel.data() + k * width + j0;
              for (std::size_t c = 0; c < cols; ++c) acc[r][c] += a[k] * b[c];
            }
          }
        }
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < cols; ++c) sink(i0 + r, t0 + j0 + c, finish_score(acc[r][c]));
        }
      }
    }
  }

  std::size_t targets() const noexcept { return n_tgt_; }

 private:
  std::size_t d_;
  std::vector<double> src_;
  std::vector<double> tgt_;
  std::size_t n_tgt_;
};

inline void check_same_dim(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt) {
  if (src.dim() != tgt.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "source dim " + std::to_string(src.dim()) + " != target dim " + std::to_string(tgt.dim()));
  }
}

}  // namespace detail

/// For every source row, the k highest-scoring target rows, best first, ties
/// broken by lower target index.
inline std::vector<std::vector<Neighbor>> top_k(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                                std::size_t k, const SearchOptions& opts = {}) {
  detail::check_same_dim(src, tgt);
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  if (k > tgt.rows()) {
    throw Error(ErrorCode::kKTooLarge, "k = " + std::to_string(k) + " exceeds target rows " + std::to_string(tgt.rows()));
  }
  if (opts.block_size == 0) throw Error(ErrorCode::kInvalidArgument, "block size must be positive");

  const detail::ScoreKernel kernel(src, tgt);
  const std::size_t bs = opts.block_size;
  const std::size_t num_blocks = (src.rows() + bs - 1) / bs;
  std::vector<std::vector<Neighbor>> result(src.rows());

  detail::for_each_block(num_blocks, opts.workers, [&](std::size_t b, unsigned) {
    const std::size_t s0 = b * bs;
    const std::size_t s1 = std::min(src.rows(), s0 + bs);
    std::vector<detail::TopKBuffer> buffers(s1 - s0, detail::TopKBuffer(k));
    std::vector<double> panel;
    for (std::size_t t0 = 0; t0 < tgt.rows(); t0 += bs) {
      kernel.run(s0, s1, t0, std::min(tgt.rows(), t0 + bs), panel,
                 [&](std::size_t i, std::size_t j, float s) { buffers[i - s0].offer(j, s); });
    }
    for (std::size_t i = s0; i < s1; ++i) result[i] = std::move(buffers[i - s0]).take();
  });
  return result;
}

/// Extracts scored pairs under `policy`, sorted by (src_idx, tgt_idx).
///
/// mutual_best keeps (i, j) when j is i's best target, i is j's best source
/// and the score reaches `min_score`. forward_best keeps each source row's
/// best target. all_above keeps every pair scoring at least `min_score`.
inline std::vector<MinedPair> mine_pairs(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, double min_score,
                                         MatchPolicy policy, const SearchOptions& opts = {}) {
  detail::check_same_dim(src, tgt);
  if (!(min_score >= -1.0 && min_score <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "min_score must lie in [-1, 1]");
  }
  if (opts.block_size == 0) throw Error(ErrorCode::kInvalidArgument, "block size must be positive");

  const detail::ScoreKernel kernel(src, tgt);
  const std::size_t bs = opts.block_size;
  const std::size_t num_blocks = (src.rows() + bs - 1) / bs;
  const unsigned workers = detail::resolve_workers(opts.workers);

  std::vector<detail::Best> forward(src.rows());
  // Per-worker best source for each target. Merging under the total order
  // ranks_before gives the same winner whatever the block-to-worker mapping.
  std::vector<std::vector<detail::Best>> backward;
  if (policy == MatchPolicy::kMutualBest) backward.assign(workers, std::vector<detail::Best>(tgt.rows()));
  std::vector<std::vector<MinedPair>> above;
  if (policy == MatchPolicy::kAllAbove) above.resize(num_blocks);

  detail::for_each_block(num_blocks, workers, [&](std::size_t b, unsigned w) {
    const std::size_t s0 = b * bs;
    const std::size_t s1 = std::min(src.rows(), s0 + bs);
    std::vector<double> panel;
    for (std::size_t t0 = 0; t0 < tgt.rows(); t0 += bs) {
      const std::size_t t1 = std::min(tgt.rows(), t0 + bs);
      switch (policy) {
        case MatchPolicy::kMutualBest:
          kernel.run(s0, s1, t0, t1, panel, [&](std::size_t i, std::size_t j, float s) {
            forward[i].offer(j, s);
            backward[w][j].offer(i, s);
          });
          break;
        case MatchPolicy::kForwardBest:
          kernel.run(s0, s1, t0, t1, panel, [&](std::size_t i, std::size_t j, float s) { forward[i].offer(j, s); });
          break;
        case MatchPolicy::kAllAbove:
          kernel.run(s0, s1, t0, t1, panel, [&](std::size_t i, std::size_t j, float s) {
            if (s >= min_score) above[b].push_back({i, j, s});
          });
          break;
      }
    }
    if (policy == MatchPolicy::kAllAbove) {
      std::sort(above[b].begin(), above[b].end(), [](const MinedPair& x, const MinedPair& y) {
        return x.src_idx != y.src_idx ? x.src_idx < y.src_idx : x.tgt_idx < y.tgt_idx;
      });
    }
  });

  std::vector<MinedPair> pairs;
  if (policy == MatchPolicy::kAllAbove) {
    for (auto& block : above) pairs.insert(pairs.end(), block.begin(), block.end());
    return pairs;
  }

  std::vector<detail::Best> best_source;
  if (policy == MatchPolicy::kMutualBest) {
    best_source = std::move(backward.front());
    for (std::size_t w = 1; w < backward.size(); ++w) {
      for (std::size_t j = 0; j < tgt.rows(); ++j) {
        if (!backward[w][j].empty()) best_source[j].offer(backward[w][j].idx, backward[w][j].score);
      }
    }
  }
  for (std::size_t i = 0; i < src.rows(); ++i) {
    const detail::Best& f = forward[i];
    if (f.empty() || !(f.score >= min_score)) continue;
    if (policy == MatchPolicy::kMutualBest && best_source[f.idx].idx != i) continue;
    pairs.push_back({i, f.idx, f.score});
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Histogram

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::size_t underflow = 0;
  std::size_t overflow = 0;

  std::size_t total() const noexcept {
    std::size_t t = underflow + overflow;
    for (auto c : counts) t += c;
    return t;
  }
};

inline void validate_edges(std::span<const double> edges) {
  if (edges.size() < 2) throw Error(ErrorCode::kBadEdges, "need at least two edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!std::isfinite(edges[i])) throw Error(ErrorCode::kBadEdges, "edge " + std::to_string(i) + " is not finite");
    if (i > 0 && !(edges[i] > edges[i - 1])) throw Error(ErrorCode::kBadEdges, "edges must be strictly increasing");
  }
}

/// Bins scores into half-open bins [edges[b], edges[b+1]). Scores below the
/// first edge count as underflow, scores at or above the last as overflow.
inline Histogram score_histogram(std::span<const MinedPair> pairs, std::span<const double> edges) {
  validate_edges(edges);
  Histogram h;
  h.edges.assign(edges.begin(), edges.end());
  h.counts.assign(edges.size() - 1, 0);
  for (const MinedPair& p : pairs) {
    if (p.score < edges.front()) {
      ++h.underflow;
    } else if (p.score >= edges.back()) {
      ++h.overflow;
    } else {
      const auto it = std::upper_bound(edges.begin(), edges.end(), p.score);
      ++h.counts[static_cast<std::size_t>(it - edges.begin()) - 1];
    }
  }
  return h;
}

/// Edges lo, lo+step, ..., hi computed from integer multiples so that values
/// such as 0.65 are the nearest doubles to their decimal spelling.
inline std::vector<double> uniform_edges(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi > lo)) throw Error(ErrorCode::kBadEdges, "bad edge range");
  const auto n = static_cast<long long>(std::llround((hi - lo) / step));
  std::vector<double> edges;
  for (long long i = 0; i <= n; ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", lo + static_cast<double>(i) * step);
    edges.push_back(std::strtod(buf, nullptr));
  }
  return edges;
}

// ---------------------------------------------------------------------------
// Mined-pair TSV: src_id \t tgt_id \t score, score with six decimals, rows
// sorted by (src_id, tgt_id). Lines starting with '#' are comments.

inline std::string format_score(double score) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", score);
  return buf;
}

/// The value a score takes after a round trip through the TSV.
inline double quantize_score(double score) { return std::strtod(format_score(score).c_str(), nullptr); }

inline void write_pairs_tsv(std::ostream& out, std::span<const MinedPair> pairs, const std::vector<std::string>& src_ids,
                            const std::vector<std::string>& tgt_ids, std::string_view comment = {}) {
  std::vector<const MinedPair*> order;
  order.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.src_idx >= src_ids.size() || p.tgt_idx >= tgt_ids.size()) {
      throw Error(ErrorCode::kDanglingIndex, "pair index out of range");
    }
    order.push_back(&p);
  }
  std::sort(order.begin(), order.end(), [&](const MinedPair* a, const MinedPair* b) {
    const auto& sa = src_ids[a->src_idx];
    const auto& sb = src_ids[b->src_idx];
    if (sa != sb) return sa < sb;
    return tgt_ids[a->tgt_idx] < tgt_ids[b->tgt_idx];
  });
  if (!comment.empty()) out << "# " << comment << '\n';
  for (const MinedPair* p : order) {
    out << src_ids[p->src_idx] << '\t' << tgt_ids[p->tgt_idx] << '\t' << format_score(p->score) << '\n';
  }
}

/// Reads a mined-pair TSV, resolving ids against the two corpora. Output is
/// sorted by (src_idx, tgt_idx).
inline std::vector<MinedPair> read_pairs_tsv(std::istream& in, const Corpus& src, const Corpus& tgt) {
  std::unordered_map<std::string_view, std::size_t> src_index, tgt_index;
  for (std::size_t i = 0; i < src.size(); ++i) src_index.emplace(src.records[i].id, i);
  for (std::size_t i = 0; i < tgt.size(); ++i) tgt_index.emplace(tgt.records[i].id, i);

  std::vector<MinedPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fail = [&](const std::string& why) {
      return Error(ErrorCode::kMalformedRecord, "pairs line " + std::to_string(line_no) + ": " + why, line_no);
    };
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos || line.find('\t', tab2 + 1) != std::string::npos) throw fail("expected 3 columns");
    const std::string_view view(line);
    const auto sid = view.substr(0, tab1);
    const auto tid = view.substr(tab1 + 1, tab2 - tab1 - 1);
    const auto score_text = view.substr(tab2 + 1);
    double score = 0.0;
    const auto [ptr, ec] = std::from_chars(score_text.data(), score_text.data() + score_text.size(), score);
    if (ec != std::errc() || ptr != score_text.data() + score_text.size() || !(score >= -1.0 && score <= 1.0)) {
      throw fail("bad score '" + std::string(score_text) + "'");
    }
    const auto s = src_index.find(sid);
    const auto t = tgt_index.find(tid);
    if (s == src_index.end()) {
      throw Error(ErrorCode::kDanglingIndex, "pairs line " + std::to_string(line_no) + ": unknown source id '" + std::string(sid) + "'", line_no);
    }
    if (t == tgt_index.end()) {
      throw Error(ErrorCode::kDanglingIndex, "pairs line " + std::to_string(line_no) + ": unknown target id '" + std::string(tid) + "'", line_no);
    }
    pairs.push_back({s->second, t->second, score});
  }
  std::sort(pairs.begin(), pairs.end(), [](const MinedPair& x, const MinedPair& y) {
    return x.src_idx != y.src_idx ? x.src_idx < y.src_idx : x.tgt_idx < y.tgt_idx;
  });
  return pairs;
}

}  // namespace anuvaad
