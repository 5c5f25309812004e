#include "cptdp/random.hpp"

#include <cmath>

namespace cptdp {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::index(std::size_t n) {
  const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

std::vector<double> Rng::simplex_point(std::size_t n) {
  std::vector<double> x(n);
  double total = 0.0;
  for (double& v : x) {
    v = -std::log1p(-uniform());
    total += v;
  }
  if (total <= 0.0) {
    x.assign(n, 1.0 / static_cast<double>(n));
    return x;
  }
  for (double& v : x) v /= total;
  return x;
}

}  // namespace cptdp
