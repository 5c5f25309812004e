#pragma once

#include <span>
#include <vector>

namespace cptdp {

struct Atom {
  double value;
  double mass;
};

/// Finite law given as (value, mass) atoms. Proper laws carry total mass 1;
/// sub-normalized laws (total <= 1) represent restrictions of a law to an
/// event, e.g. "the successor is not absorbing".
///
/// Atom values may repeat and zero-mass atoms are kept; neither affects any
/// evaluation.
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;

  /// Throws std::invalid_argument unless every mass is >= 0, every value is
  /// finite and the masses sum to 1 within kProbabilityTolerance.
  static DiscreteDistribution proper(std::vector<Atom> atoms);

  /// Same checks, but the total only has to be <= 1 + kProbabilityTolerance.
  static DiscreteDistribution sub_normalized(std::vector<Atom> atoms);

  static DiscreteDistribution point_mass(double value);

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double total_mass() const { return total_mass_; }

  bool is_sub_normalized() const { return sub_normalized_; }
  /// Total mass within kProbabilityTolerance of 1.
  bool is_proper() const;

  double mean() const;
  double min_value() const;
  double max_value() const;

  /// Atoms sorted by value with equal values combined and zero masses dropped.
  DiscreteDistribution merged() const;

 private:
  DiscreteDistribution(std::vector<Atom> atoms, double total, bool sub_normalized)
      : atoms_(std::move(atoms)), total_mass_(total), sub_normalized_(sub_normalized) {}

  std::vector<Atom> atoms_;
  double total_mass_ = 0.0;
  bool sub_normalized_ = false;
};

}  // namespace cptdp
