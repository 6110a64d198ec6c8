#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace polyreach {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Child seed for a named sub-stream. Order-independent: the result depends
/// only on (parent, stream), never on how many other streams were derived.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept {
  return mix64(parent ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Counter-based generator: the i-th draw is a pure function of (key, i), so
/// any slice of the stream can be produced without generating what precedes
/// it. This is what lets probe generation split across threads while staying
/// bitwise identical to a sequential run.
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0) noexcept
      : key_(mix64(seed + kGamma)), counter_(counter) {}

  std::uint64_t at(std::uint64_t i) const noexcept { return mix64(key_ + (i + 1) * kGamma); }

  std::uint64_t next() noexcept { return at(counter_++); }

  /// Uniform on [0, 1) with 53 random bits.
  static double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  double uniform() noexcept { return to_unit(next()); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  double normal() noexcept {
    // Box-Muller; u1 in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t counter() const noexcept { return counter_; }
  void seek(std::uint64_t counter) noexcept { counter_ = counter; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace polyreach
