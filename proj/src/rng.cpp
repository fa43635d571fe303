#include "bitgrip/rng.hpp"

#include <algorithm>
#include <vector>

#include "bitgrip/error.hpp"

namespace bitgrip {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::EmptyPile: return "EmptyPile";
    case ErrorCode::OverCapacity: return "OverCapacity";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::ScaleUnstableTimeout: return "ScaleUnstableTimeout";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DockOccupied: return "DockOccupied";
    case ErrorCode::DockEmpty: return "DockEmpty";
    case ErrorCode::UnknownDock: return "UnknownDock";
    case ErrorCode::UnknownAssembly: return "UnknownAssembly";
    case ErrorCode::NotFaulted: return "NotFaulted";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::UnknownFood: return "UnknownFood";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Rng::Rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

Rng Rng::derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * tags.size());
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto t : tags) push(t);
  std::seed_seq seq(words.begin(), words.end());
  Rng rng;
  rng.engine_.seed(seq);
  return rng;
}

double Rng::uniform(double lo, double hi) {
  if (hi <= lo) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

int Rng::uniform_int(int lo, int hi) {
  if (hi <= lo) return lo;
  return std::uniform_int_distribution<int>(lo, hi)(engine_);
}

double Rng::normal(double mean, double sd) {
  if (sd <= 0.0) return mean;
  return std::normal_distribution<double>(mean, sd)(engine_);
}

double Rng::truncated_normal(double mean, double sd, double bound_sd) {
  if (sd <= 0.0) return mean;
  std::normal_distribution<double> dist(0.0, 1.0);
  for (;;) {
    const double z = dist(engine_);
    if (z >= -bound_sd && z <= bound_sd) return mean + sd * z;
  }
}

bool Rng::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::bernoulli_distribution(p)(engine_);
}

int Rng::poisson(double lambda) {
  if (lambda <= 0.0) return 0;
  return std::poisson_distribution<int>(lambda)(engine_);
}

std::size_t Rng::index(std::size_t n) {
  if (n <= 1) return 0;
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

}  // namespace bitgrip
