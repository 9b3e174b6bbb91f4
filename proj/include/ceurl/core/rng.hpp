#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <random>

namespace ceurl {

/// SplitMix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Explicit random stream. Every sampling routine in the library takes one of
/// these; there is no global generator.
///
/// Only the raw 64-bit output of mt19937_64 is used, so sequences are
/// identical across standard library implementations (the std distributions
/// are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  int below(int n) { return static_cast<int>(uniform() * n); }

  /// Index drawn from unnormalized nonnegative weights.
  template <typename Derived>
  int categorical(const Eigen::DenseBase<Derived>& weights) {
    const double total = static_cast<double>(weights.sum());
    const double u = uniform() * total;
    double acc = 0.0;
    int last_positive = 0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      const double w = static_cast<double>(weights(i));
      if (w <= 0.0) continue;
      acc += w;
      last_positive = static_cast<int>(i);
      if (u < acc) return static_cast<int>(i);
    }
    return last_positive;
  }

  /// Standard exponential variate; normalized vectors of these are
  /// Dirichlet(1, ..., 1) samples.
  double exponential() { return -std::log1p(-uniform()); }

  /// Independent child stream keyed by `stream`.
  Rng fork(std::uint64_t stream) const { return Rng(mix_seed(seed_ ^ mix_seed(stream + 0x5851f42d4c957f2dULL))); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Uniform Dirichlet(1) sample of dimension n.
inline Eigen::VectorXd random_simplex_point(Rng& rng, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.exponential();
  return v / v.sum();
}

}  // namespace ceurl
