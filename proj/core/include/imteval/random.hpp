// SPDX-License-Identifier: Apache-2.0
#pragma once

// Reproducible random streams.
//
// Every random draw in a run comes from a stream derived from
// (master_seed, drop_index, link_id). Derivation is SplitMix64 mixing of the
// triple; the generator is xoshiro256**. Distribution transforms are written
// here rather than taken from <random>, whose distributions are
// implementation-defined, so outputs match across standard libraries.

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace imteval {

/// Stateless 64-bit finalizer (SplitMix64 output function).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t key) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next(); }

  std::uint64_t next() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1]; safe to take the logarithm of.
  double uniform_open() noexcept {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;
  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }
  double exponential(double rate) noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept;

  /// Fisher-Yates shuffle with a fixed draw order.
  template <class T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::array<std::uint64_t, 4> s_{};
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Stream for one (drop, link) pair. Same triple gives the same sequence on
/// every platform; distinct triples give independent-looking sequences.
RngStream derive_stream(std::uint64_t master_seed, std::uint64_t drop_index,
                        std::uint64_t link_id) noexcept;

/// Link-id namespaces. The top byte selects the purpose, the rest an index.
namespace stream_id {
inline constexpr std::uint64_t kPurposeShift = 56;
constexpr std::uint64_t make(std::uint64_t purpose, std::uint64_t index) noexcept {
  return (purpose << kPurposeShift) | (index & ((1ULL << kPurposeShift) - 1));
}
constexpr std::uint64_t placement(std::uint64_t i = 0) noexcept { return make(1, i); }
constexpr std::uint64_t link(std::uint64_t i) noexcept { return make(2, i); }
constexpr std::uint64_t fading(std::uint64_t i) noexcept { return make(3, i); }
constexpr std::uint64_t coschedule(std::uint64_t i) noexcept { return make(4, i); }
constexpr std::uint64_t traffic(std::uint64_t i) noexcept { return make(5, i); }
constexpr std::uint64_t layout(std::uint64_t i = 0) noexcept { return make(6, i); }

/// Drop indices at and above this value are reserved for calibration and
/// layout draws so they never alias a simulated drop.
inline constexpr std::uint64_t kReservedDropBase = 1ULL << 62;
}  // namespace stream_id

}  // namespace imteval
