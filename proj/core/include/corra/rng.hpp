#pragma once

#include <cstdint>
#include <random>

#include "corra/types.hpp"

namespace corra {

// splitmix64 finalizer; used to derive independent stream seeds from one
// user-facing seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix_seed(mix_seed(base) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

// Seeded random source. Not thread-safe; give each worker its own instance.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::mt19937_64& engine() { return engine_; }

  // Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

  double normal() { return normal_(engine_); }

  // Circularly symmetric complex Gaussian with E|z|^2 = variance.
  Complex complex_normal(double variance = 1.0) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {s * re, s * im};
  }

  // Uniform integer in [0, n).
  int uniform_index(int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(engine_);
  }

  CVector complex_normal_vector(int n, double variance = 1.0) {
    CVector z(n);
    for (int i = 0; i < n; ++i) z(i) = complex_normal(variance);
    return z;
  }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace corra
