#include "cptdp/distribution.hpp"

#include "cptdp/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cptdp {

namespace {

double checked_total(const std::vector<Atom>& atoms) {
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    if (!std::isfinite(a.value)) {
      std::ostringstream msg;
      msg << "distribution: atom " << i << " has a non-finite value";
      throw std::invalid_argument(msg.str());
    }
    if (!(a.mass >= 0.0) || !std::isfinite(a.mass)) {
      std::ostringstream msg;
      msg << "distribution: atom " << i << " has invalid mass " << a.mass;
      throw std::invalid_argument(msg.str());
    }
    total += a.mass;
  }
  return total;
}

}  // namespace

DiscreteDistribution DiscreteDistribution::proper(std::vector<Atom> atoms) {
  const double total = checked_total(atoms);
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "distribution: masses sum to " << total << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
  return DiscreteDistribution(std::move(atoms), total, false);
}

DiscreteDistribution DiscreteDistribution::sub_normalized(std::vector<Atom> atoms) {
  const double total = checked_total(atoms);
  if (total > 1.0 + kProbabilityTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "distribution: masses sum to " << total << ", which exceeds 1";
    throw std::invalid_argument(msg.str());
  }
  return DiscreteDistribution(std::move(atoms), total, true);
}

DiscreteDistribution DiscreteDistribution::point_mass(double value) {
  return proper({{value, 1.0}});
}

bool DiscreteDistribution::is_proper() const {
  return std::abs(total_mass_ - 1.0) <= kProbabilityTolerance;
}

double DiscreteDistribution::mean() const {
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.value * a.mass;
  return m;
}

double DiscreteDistribution::min_value() const {
  double v = std::numeric_limits<double>::infinity();
  for (const Atom& a : atoms_) v = std::min(v, a.value);
  return v;
}

double DiscreteDistribution::max_value() const {
  double v = -std::numeric_limits<double>::infinity();
  for (const Atom& a : atoms_) v = std::max(v, a.value);
  return v;
}

DiscreteDistribution DiscreteDistribution::merged() const {
  std::vector<Atom> sorted(atoms_.begin(), atoms_.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Atom& a, const Atom& b) { return a.value < b.value; });
  std::vector<Atom> out;
  for (const Atom& a : sorted) {
    if (a.mass == 0.0) continue;
    if (!out.empty() && out.back().value == a.value) {
      out.back().mass += a.mass;
    } else {
      out.push_back(a);
    }
  }
  return DiscreteDistribution(std::move(out), total_mass_, sub_normalized_);
}

}  // namespace cptdp
