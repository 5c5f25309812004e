#pragma once

#include "cptdp/cpt_spec.hpp"
#include "cptdp/distribution.hpp"

#include <stdexcept>

namespace cptdp {

/// The two integrals of the CPT functional, kept apart.
struct CptParts {
  double gains = 0.0;   ///< integral of w+(P(u+((X-b)+) > x)) over x >= 0
  double losses = 0.0;  ///< integral of w-(P(u-((X-b)-) > x)) over x >= 0

  double value() const { return gains - losses; }
};

/// Raised when an iterative numerical routine exhausts its budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Staircase evaluation of both integrals. The tail probabilities are read
/// off the given masses as they are, so a sub-normalized law simply
/// contributes less mass; nothing is renormalized.
CptParts cpt_parts(const DiscreteDistribution& dist, const CptSpec& spec);

/// Exact CPT value of a proper law. Throws std::invalid_argument for a law
/// whose total mass is not 1.
double cpt_value_exact(const DiscreteDistribution& dist, const CptSpec& spec);

/// Same staircase as cpt_value_exact, accepting total mass <= 1.
double cpt_value_subnormalized(const DiscreteDistribution& dist, const CptSpec& spec);

/// Adaptive Gauss-Kronrod evaluation of both integrals, split at the jump
/// points of the tail function and with tail probabilities recomputed by
/// direct summation at each node. Intended as an independent check of the
/// staircase. Throws ConvergenceError when the error estimate exceeds `tol`.
double cpt_value_quadrature(const DiscreteDistribution& dist, const CptSpec& spec, double tol);

}  // namespace cptdp
