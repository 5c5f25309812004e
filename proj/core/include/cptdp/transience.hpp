#pragma once

#include "cptdp/markov_model.hpp"

#include <vector>

namespace cptdp {

/// Partial sums of the non-absorption probabilities
///   S_K(x0) = sum_{k=0}^{K} P(x_{k+1} != x_A | x_0 = x0).
struct PliskaReport {
  double bound = 0.0;             ///< max over non-absorbing x0 of S_K(x0)
  std::vector<double> per_state;  ///< S_K(x0); 0 at the absorbing state
  bool converged = false;         ///< last increment fell below tol
  std::size_t terms = 0;          ///< number of k-terms summed
  double last_increment = 0.0;
  double observed_ratio = 0.0;    ///< ratio of the last two max increments
};

/// Exact propagation of non-absorption mass under a stationary randomized
/// policy, summing at most horizon + 1 terms and stopping early once the
/// largest increment drops below tol. The bound is a lower bound for the
/// infinite sum; when increments shrink geometrically with ratio rho < 1 the
/// remainder is at most last_increment * rho / (1 - rho).
///
/// Throws std::invalid_argument for a discounted model.
PliskaReport pliska_check(const MarkovModel& model, const RandomizedPolicy& policy, std::size_t horizon,
                          double tol);

/// Worst case of the same sums over all policies, via the dynamic program
///   V_{k+1}(x) = max_a [ q(x, a) + sum_y P~(y | x, a) V_k(y) ],
/// with q(x, a) the one-step non-absorption probability. Non-absorption is
/// affine in the action mix, so deterministic maximizers attain the worst
/// case over randomized policies too. Converged means the model is
/// certified uniformly transient with constant `bound` (up to tol-sized
/// remainder).
PliskaReport uniform_transience_check(const MarkovModel& model, std::size_t horizon, double tol);

}  // namespace cptdp
