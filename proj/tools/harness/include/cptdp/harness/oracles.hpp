#pragma once

#include "cptdp/markov_model.hpp"

#include <vector>

namespace cptdp::harness {

/// Classical expected-cost value iteration, written without any CPT code:
///   Q(x, a) = sum_d P(d) [ g(x, a, d) + c J(f(x, a, d)) ],  J = min_a Q,
/// where c is the discount (discounted) or 1 (transient, with outcomes that
/// enter the absorbing state left out of the sum).
struct ClassicalSolution {
  ValueFunction value;
  std::vector<std::vector<double>> q;  ///< Q-values at the returned value
  std::size_t iterations = 0;
  bool converged = false;
};

ClassicalSolution expected_cost_value_iteration(const MarkovModel& model, double tol, std::size_t max_iter);

}  // namespace cptdp::harness
