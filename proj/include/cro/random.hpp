#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cro {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// FNV-1a over a short tag; stable across platforms and compilers.
constexpr std::uint64_t hash_tag(std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Single-owner seeded stream of uniform variates. Copyable so a state can be
/// snapshotted and replayed; never share one instance between runs.
class RandomSource {
public:
  explicit RandomSource(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1); u = 0 is remapped to the smallest positive draw.
  double uniform_open() noexcept {
    double u = uniform();
    return u == 0.0 ? 0x1.0p-53 : u;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n) noexcept {
    // Lemire-free modulo is fine here: n is tiny compared to 2^64.
    return static_cast<std::size_t>(engine_() % n);
  }

  bool coin() noexcept { return (engine_() >> 63) != 0; }

  friend bool operator==(const RandomSource &, const RandomSource &) = default;

private:
  std::mt19937_64 engine_;
};

} // namespace cro
