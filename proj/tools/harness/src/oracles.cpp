#include "cptdp/harness/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cptdp::harness {

ClassicalSolution expected_cost_value_iteration(const MarkovModel& model, double tol, std::size_t max_iter) {
  require_valid(model);
  const std::size_t n = model.num_states();
  const double factor = model.continuation_factor();
  const auto absorbing = model.absorbing_state();

  ClassicalSolution sol;
  std::vector<double> J(n, 0.0);
  std::vector<std::vector<double>> q(n);

  auto sweep = [&](const std::vector<double>& cur) {
    std::vector<double> next(n, 0.0);
    for (StateIndex x = 0; x < n; ++x) {
      const auto acts = model.actions(x);
      q[x].assign(acts.size(), 0.0);
      if (absorbing && x == *absorbing) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < acts.size(); ++a) {
        double total = 0.0;
        for (const Outcome& o : acts[a].outcomes) {
          if (absorbing && o.next == *absorbing) continue;
          total += o.mass * (o.cost + factor * cur[o.next]);
        }
        q[x][a] = total;
        best = std::min(best, total);
      }
      next[x] = best;
    }
    return next;
  };

  while (sol.iterations < max_iter) {
    std::vector<double> next = sweep(J);
    double diff = 0.0;
    for (StateIndex x = 0; x < n; ++x) diff = std::max(diff, std::abs(next[x] - J[x]));
    J = std::move(next);
    ++sol.iterations;
    if (diff <= tol) {
      sol.converged = true;
      break;
    }
  }
  sweep(J);  // Q-values at the returned J
  sol.value = ValueFunction(std::move(J));
  sol.q = std::move(q);
  return sol;
}

}  // namespace cptdp::harness
