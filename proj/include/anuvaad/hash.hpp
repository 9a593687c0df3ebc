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

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace anuvaad {

// XXH64 (xxHash, 64-bit variant), byte-for-byte compatible with the reference
// implementation. Used as the embedding-file checksum and for seed derivation.
class Xxh64 {
 public:
  explicit Xxh64(std::uint64_t seed = 0) noexcept { reset(seed); }

  void reset(std::uint64_t seed = 0) noexcept {
    v_[0] = seed + kP1 + kP2;
    v_[1] = seed + kP2;
    v_[2] = seed;
    v_[3] = seed - kP1;
    seed_ = seed;
    total_ = 0;
    buffered_ = 0;
  }

  void update(const void* data, std::size_t len) noexcept {
    const auto* p = static_cast<const unsigned char*>(data);
    total_ += len;
    if (buffered_ + len < 32) {
      std::memcpy(buf_ + buffered_, p, len);
      buffered_ += len;
      return;
    }
    if (buffered_ > 0) {
      const std::size_t fill = 32 - buffered_;
      std::memcpy(buf_ + buffered_, p, fill);
      consume_stripe(buf_);
      p += fill;
      len -= fill;
      buffered_ = 0;
    }
    while (len >= 32) {
      consume_stripe(p);
      p += 32;
      len -= 32;
    }
    std::memcpy(buf_, p, len);
    buffered_ = len;
  }

  void update(std::string_view s) noexcept { update(s.data(), s.size()); }

  std::uint64_t digest() const noexcept {
    std::uint64_t h;
    if (total_ >= 32) {
      h = rotl(v_[0], 1) + rotl(v_[1], 7) + rotl(v_[2], 12) + rotl(v_[3], 18);
      for (std::uint64_t v : v_) h = merge_round(h, v);
    } else {
      h = seed_ + kP5;
    }
    h += total_;

    const unsigned char* p = buf_;
    std::size_t len = buffered_;
    while (len >= 8) {
      h ^= round(0, read64(p));
      h = rotl(h, 27) * kP1 + kP4;
      p += 8;
      len -= 8;
    }
    if (len >= 4) {
      h ^= static_cast<std::uint64_t>(read32(p)) * kP1;
      h = rotl(h, 23) * kP2 + kP3;
      p += 4;
      len -= 4;
    }
    while (len > 0) {
      h ^= static_cast<std::uint64_t>(*p) * kP5;
      h = rotl(h, 11) * kP1;
      ++p;
      --len;
    }
    h ^= h >> 33;
    h *= kP2;
    h ^= h >> 29;
    h *= kP3;
    h ^= h >> 32;
    return h;
  }

 private:
  static constexpr std::uint64_t kP1 = 0x9E3779B185EBCA87ULL;
  static constexpr std::uint64_t kP2 = 0xC2B2AE3D27D4EB4FULL;
  static constexpr std::uint64_t kP3 = 0x165667B19E3779F9ULL;
  static constexpr std::uint64_t kP4 = 0x85EBCA77C2B2AE63ULL;
  static constexpr std::uint64_t kP5 = 0x27D4EB2F165667C5ULL;

  static constexpr std::uint64_t rotl(std::uint64_t x, int r) noexcept {
    return (x << r) | (x >> (64 - r));
  }
  static constexpr std::uint64_t round(std::uint64_t acc, std::uint64_t in) noexcept {
    acc += in * kP2;
    acc = rotl(acc, 31);
    return acc * kP1;
  }
  static constexpr std::uint64_t merge_round(std::uint64_t acc, std::uint64_t v) noexcept {
    acc ^= round(0, v);
    return acc * kP1 + kP4;
  }
  static std::uint64_t read64(const unsigned char* p) noexcept {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
  }
  static std::uint32_t read32(const unsigned char* p) noexcept {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
  }
  void consume_stripe(const unsigned char* p) noexcept {
    for (int i = 0; i < 4; ++i) v_[i] = round(v_[i], read64(p + 8 * i));
  }

  std::uint64_t v_[4];
  std::uint64_t seed_ = 0;
  std::uint64_t total_ = 0;
  unsigned char buf_[32];
  std::size_t buffered_ = 0;
};

inline std::uint64_t xxh64(std::string_view bytes, std::uint64_t seed = 0) noexcept {
  Xxh64 h(seed);
  h.update(bytes);
  return h.digest();
}

// Stage seeds: XXH64 of the stage label keyed by the global seed. Stable
// across platforms and independent of the order stages run in.
inline std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view label) noexcept {
  return xxh64(label, global_seed);
}

inline std::string to_hex(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
    v >>= 4;
  }
  return out;
}

}  // namespace anuvaad
