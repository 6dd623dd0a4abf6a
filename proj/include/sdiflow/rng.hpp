#pragma once

#include <cstdint>
#include <random>

#include "sdiflow/common.hpp"

namespace sdiflow {

/// SplitMix64 step, used to whiten seeds and derive per-path streams.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based derivation: path i draws from seed ^ hash(i), so paths are
/// independent of execution order and thread count.
inline std::uint64_t path_seed(std::uint64_t base_seed, std::uint64_t path_index) {
  return base_seed ^ splitmix64(path_index + 1);
}

/// A self-contained Gaussian stream. One instance per sample path.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double gaussian() { return normal_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// dim independent N(0, h) entries.
inline void brownian_increment_into(double h, RandomStream& rng, Vec& out) {
  require(h > 0.0, "brownian_increment: h must be > 0");
  const double s = std::sqrt(h);
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = s * rng.gaussian();
}

inline Vec brownian_increment(int dim, double h, RandomStream& rng) {
  require(dim > 0, "brownian_increment: dim must be positive");
  Vec out(dim);
  brownian_increment_into(h, rng, out);
  return out;
}

}  // namespace sdiflow
