#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace cptdp {

/// Seed for stream `stream` derived from `master` by SplitMix64 finalization
/// of master + (stream + 1) * golden-ratio increment. Every seeded component
/// in the library fans out through this one function.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Thin wrapper over mt19937_64 with platform-independent conversions (the
/// standard distributions are not bit-reproducible across libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform index in [0, n).
  std::size_t index(std::size_t n);
  /// Uniform point on the probability simplex of dimension n.
  std::vector<double> simplex_point(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace cptdp
