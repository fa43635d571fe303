#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bitgrip {

/// Seeded random stream. Every simulation entity that needs randomness takes
/// one of these by reference; independent streams come from derive().
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  /// Stream keyed by (seed, tags...). Identical keys give identical streams.
  static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);  // inclusive
  double normal(double mean, double sd);
  /// Normal truncated to mean ± bound_sd·sd by rejection.
  double truncated_normal(double mean, double sd, double bound_sd = 4.0);
  bool bernoulli(double p);
  int poisson(double lambda);
  std::size_t index(std::size_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bitgrip
