/*
 * Copyright 2026 The vsmhl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef VSMHL_RNG_HPP
#define VSMHL_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>

namespace vsmhl {

/// SplitMix64 finalizer; used to derive stream keys.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/**
 * Philox4x32-10 counter-based generator.
 *
 * The output stream is a pure function of (key, counter). Child streams are
 * obtained with split(id), which hashes the id into a fresh key, so stream
 * (seed, N, replication) is independent of how many other streams exist or
 * of the order in which they are consumed.
 *
 * Satisfies UniformRandomBitGenerator with 64-bit output.
 */
class Rng {
public:
  using result_type = std::uint64_t;
  using block_type = std::array<std::uint32_t, 4>;
  using key_type = std::array<std::uint32_t, 2>;

  explicit Rng(std::uint64_t seed = 0) noexcept : key_seed_(splitmix64(seed)) {
    set_key(key_seed_);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (pos_ >= 2) {
      refill();
    }
    const auto lo = static_cast<std::uint64_t>(buffer_[2 * pos_]);
    const auto hi = static_cast<std::uint64_t>(buffer_[2 * pos_ + 1]);
    ++pos_;
    return (hi << 32) | lo;
  }

  /// Independent child stream; does not advance *this.
  Rng split(std::uint64_t stream_id) const noexcept {
    Rng child;
    child.key_seed_ = splitmix64(key_seed_ ^ splitmix64(stream_id + 0x632be59bd9b4e019ull));
    child.set_key(child.key_seed_);
    return child;
  }

  /// Raw Philox4x32-10 bijection, exposed for known-answer tests.
  static block_type philox(block_type ctr, key_type key) noexcept {
    constexpr std::uint32_t m0 = 0xD2511F53u;
    constexpr std::uint32_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += w0;
      key[1] += w1;
    }
    return ctr;
  }

private:
  void set_key(std::uint64_t k) noexcept {
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    counter_ = 0;
    pos_ = 2;
  }

  void refill() noexcept {
    const block_type ctr = {static_cast<std::uint32_t>(counter_),
                            static_cast<std::uint32_t>(counter_ >> 32), 0u, 0u};
    buffer_ = philox(ctr, key_);
    ++counter_;
    pos_ = 0;
  }

  std::uint64_t key_seed_ = 0;
  key_type key_{};
  std::uint64_t counter_ = 0;
  block_type buffer_{};
  unsigned pos_ = 2;
};

} // namespace vsmhl

#endif // VSMHL_RNG_HPP
