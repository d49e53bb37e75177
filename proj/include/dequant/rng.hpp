#pragma once

#include <cstdint>
#include <limits>

namespace dequant {

namespace detail {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based generator: the i-th output is a pure function of (key, i).
///
/// Streams are cheap to derive, so every independent unit of randomized work
/// (a median repetition, a power, a threshold test) gets its own stream keyed
/// on its position. Results then do not depend on how work is scheduled
/// across threads.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept
      : key_(derive_key(detail::mix64(seed + detail::kGoldenGamma), stream)) {}

  static CounterRng from_key(std::uint64_t key) noexcept {
    CounterRng rng;
    rng.key_ = key;
    return rng;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::kGoldenGamma);
  }

  /// Independent child stream; does not advance this generator.
  CounterRng derive(std::uint64_t id) const noexcept { return from_key(derive_key(key_, id)); }

  /// Child stream keyed on a fresh draw from this generator.
  CounterRng split() noexcept { return from_key((*this)()); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = (*this)();
      if (r >= threshold) return r % n;
    }
  }

  /// Standard normal via Box-Muller (one value per call).
  double normal() noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t id) noexcept {
    return detail::mix64(key ^ detail::mix64(id * detail::kGoldenGamma + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace dequant

#include <cmath>

inline double dequant::CounterRng::normal() noexcept {
  // 1 - uniform() lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}
