#pragma once

#include "cptdp/bellman.hpp"
#include "cptdp/cpt_spec.hpp"
#include "cptdp/distribution.hpp"
#include "cptdp/markov_model.hpp"
#include "cptdp/transience.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cptdp {

// Numerical checks of the monotonicity and contraction properties of the CPT
// Bellman operators. These are falsification searches over sampled or
// structured inputs; passing is evidence, not proof.

struct MonotonicityViolation {
  StateIndex state;
  std::vector<double> mix;
  double h_lower;  ///< H(x, mix, J)
  double h_upper;  ///< H(x, mix, J') with J <= J'
};

struct MonotonicityReport {
  std::size_t trials = 0;
  std::vector<MonotonicityViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Random pairs J <= J' (J' = J plus a non-negative perturbation) at random
/// non-absorbing states and mixes; flags H(J) > H(J') + 1e-10.
MonotonicityReport monotonicity_probe(const MarkovModel& model, const CptSpec& spec, std::size_t trials,
                                      std::uint64_t seed);

struct ContractionCheck {
  /// Set when a structural precondition fails; the numeric fields are then
  /// left at their defaults.
  std::optional<std::string> structural_failure;
  double beta_hat = 0.0;
  bool pass = false;
  std::size_t worst_index = 0;  ///< position in the Z family
  double worst_level = 0.0;     ///< c' at which beta_hat was attained
};

/// Structured test laws for Z over [0, scale * c]: point masses on a 21-point
/// grid, two-point laws {0 w.p. 1-q, a w.p. q} for five values of a with q
/// on a 1/1000 grid plus 1200 log-spaced values in [1e-6, 0.5) and their
/// mirrors 1 - q, and equally spaced uniform laws with 2, 5, 10, 50 atoms on
/// three sub-intervals.
std::vector<DiscreteDistribution> default_z_family(double c, double scale = 2.0);

/// Levels c' used by contraction_condition_check when none are given.
std::vector<double> default_levels(double c);

/// For every Z in the family and level c', evaluates
///   (1/c') [ int_0^{alpha c'} w+(P(Z < z)) u+'(alpha c' - z) dz
///          + int_0^{alpha c'} w-(P(Z > z)) u-'(z) dz ]
/// by Gauss-Kronrod quadrature split at the atoms of Z, and reports the
/// maximum as beta_hat; pass iff beta_hat < 1. Utilities must have a finite
/// derivative at 0; otherwise a structural failure is returned.
ContractionCheck contraction_condition_check(const CptSpec& spec, double alpha, double c,
                                             const std::vector<DiscreteDistribution>& z_family,
                                             const std::vector<double>& levels = {});

struct ModulusEstimate {
  double max_ratio = 0.0;
  std::size_t pairs = 0;
};

/// max ||T_mu J - T_mu J'|| / ||J - J'|| over random (J, J', mu). Half of the
/// pairs are uniform shifts J' = J + s, which attain the bound for operators
/// that are linear in J. J(x_A) is held at 0 in transient mode.
ModulusEstimate empirical_contraction_modulus(const MarkovModel& model, const CptSpec& spec,
                                              std::size_t trials, std::uint64_t seed);

struct KStepProbe {
  std::optional<std::string> structural_failure;
  std::optional<std::size_t> k;  ///< first K with observed modulus < 1 - 1e-6
  std::vector<double> moduli;    ///< observed modulus for K = 1, 2, ...
  std::optional<double> xi;      ///< linear bound on the weightings
  PliskaReport transience;       ///< uniform transience certificate
};

/// Checks the structural hypotheses for a K-step contraction of the
/// transient operator (uniform transience, bounded u'(0), w(p) <= xi p) and
/// then measures ||T_mu^K J - T_mu^K J'|| / ||J - J'|| for K = 1..k_max.
/// Throws std::invalid_argument for a discounted model.
KStepProbe k_step_contraction_probe(const MarkovModel& model, const CptSpec& spec, std::size_t k_max,
                                    std::size_t trials, std::uint64_t seed);

}  // namespace cptdp
