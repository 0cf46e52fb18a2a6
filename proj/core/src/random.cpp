// SPDX-License-Identifier: Apache-2.0
#include "imteval/random.hpp"

#include <cmath>
#include <numbers>

namespace imteval {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t key) noexcept {
  std::uint64_t state = key;
  for (auto& word : s_) {
    state += kGolden;
    word = mix64(state);
  }
  // xoshiro must not start from the all-zero state.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = kGolden;
}

std::uint64_t RngStream::next() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::normal() noexcept {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

double RngStream::exponential(double rate) noexcept {
  return -std::log(uniform_open()) / rate;
}

__extension__ typedef unsigned __int128 uint128;

std::uint64_t RngStream::below(std::uint64_t n) noexcept {
  // Lemire's multiply-shift with rejection of the biased low region.
  uint128 m = static_cast<uint128>(next()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<uint128>(next()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t drop_index,
                        std::uint64_t link_id) noexcept {
  std::uint64_t key = mix64(master_seed + kGolden);
  key = mix64(key ^ (drop_index * 0xd1b54a32d192ed03ULL + kGolden));
  key = mix64(key ^ (link_id * 0xaef17502108ef2d9ULL + 0x632be59bd9b4e019ULL));
  return RngStream(key);
}

}  // namespace imteval
