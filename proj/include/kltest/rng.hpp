#pragma once

#include <cstdint>

namespace kltest {

// splitmix64 finalizer; the mixing core of the seed derivation and stream.
inline std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic pseudo-random stream. Not std::mt19937 + std::*_distribution
/// because the outputs here must be bit-identical across compilers and
/// platforms for the reproducibility contracts.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// Stable order-independent per-trial seed: results depend only on the
/// (master_seed, n, trial, role) tuple, never on execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n,
                                 std::uint64_t trial, std::uint64_t role) noexcept {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ n);
  h = mix64(h ^ trial);
  h = mix64(h ^ role);
  return h;
}

}  // namespace kltest
