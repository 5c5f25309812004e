#include "cptdp/transience.hpp"

#include <algorithm>
#include <stdexcept>

namespace cptdp {

namespace {

StateIndex require_transient(const MarkovModel& model, const char* who) {
  const auto absorbing = model.absorbing_state();
  if (!absorbing) throw std::invalid_argument(std::string(who) + ": model is not in transient mode");
  return *absorbing;
}

// One step of the recursion for a single action: q(x, a) + sum over
// non-absorbing successors of P(y | x, a) * inc(y).
double action_term(const Action& action, StateIndex absorbing, const std::vector<double>& inc,
                   bool first) {
  double s = 0.0;
  for (const Outcome& o : action.outcomes) {
    if (o.next == absorbing) continue;
    s += o.mass * (first ? 1.0 : inc[o.next]);
  }
  return s;
}

template <class StepFn>
PliskaReport accumulate(const MarkovModel& model, StateIndex absorbing, std::size_t horizon, double tol,
                        StepFn step) {
  const std::size_t n = model.num_states();
  PliskaReport report;
  report.per_state.assign(n, 0.0);
  std::vector<double> inc(n, 0.0);
  std::vector<double> next(n, 0.0);
  double prev_max = 0.0;

  for (std::size_t k = 0; k <= horizon; ++k) {
    double max_inc = 0.0;
    for (StateIndex x = 0; x < n; ++x) {
      next[x] = x == absorbing ? 0.0 : step(x, inc, k == 0);
      max_inc = std::max(max_inc, next[x]);
    }
    inc.swap(next);
    for (StateIndex x = 0; x < n; ++x) report.per_state[x] += inc[x];
    report.terms = k + 1;
    report.last_increment = max_inc;
    if (k > 0 && prev_max > 0.0) report.observed_ratio = max_inc / prev_max;
    prev_max = max_inc;
    if (max_inc < tol) {
      report.converged = true;
      break;
    }
  }
  report.bound = *std::max_element(report.per_state.begin(), report.per_state.end());
  return report;
}

}  // namespace

PliskaReport pliska_check(const MarkovModel& model, const RandomizedPolicy& policy, std::size_t horizon,
                          double tol) {
  const StateIndex absorbing = require_transient(model, "pliska_check");
  validate_policy(model, policy);
  return accumulate(model, absorbing, horizon, tol,
                    [&](StateIndex x, const std::vector<double>& inc, bool first) {
                      const auto acts = model.actions(x);
                      const auto mix = policy.at(x);
                      double s = 0.0;
                      for (std::size_t a = 0; a < acts.size(); ++a) {
                        if (mix[a] == 0.0) continue;
                        s += mix[a] * action_term(acts[a], absorbing, inc, first);
                      }
                      return s;
                    });
}

PliskaReport uniform_transience_check(const MarkovModel& model, std::size_t horizon, double tol) {
  const StateIndex absorbing = require_transient(model, "uniform_transience_check");
  // The increment at step k of the worst-case recursion is V_k - V_{k-1};
  // track V itself and difference it.
  const std::size_t n = model.num_states();
  std::vector<double> value(n, 0.0);
  std::vector<double> fresh(n, 0.0);
  PliskaReport report;
  report.per_state.assign(n, 0.0);
  double prev_max = 0.0;
  for (std::size_t k = 0; k <= horizon; ++k) {
    double max_inc = 0.0;
    for (StateIndex x = 0; x < n; ++x) {
      if (x == absorbing) {
        fresh[x] = 0.0;
        continue;
      }
      double best = 0.0;
      for (const Action& act : model.actions(x)) {
        double s = 0.0;
        for (const Outcome& o : act.outcomes) {
          if (o.next == absorbing) continue;
          s += o.mass * (1.0 + value[o.next]);
        }
        best = std::max(best, s);
      }
      fresh[x] = best;
      max_inc = std::max(max_inc, fresh[x] - value[x]);
    }
    value.swap(fresh);
    report.terms = k + 1;
    report.last_increment = max_inc;
    if (k > 0 && prev_max > 0.0) report.observed_ratio = max_inc / prev_max;
    prev_max = max_inc;
    if (max_inc < tol) {
      report.converged = true;
      break;
    }
  }
  report.per_state = value;
  report.bound = *std::max_element(value.begin(), value.end());
  return report;
}

}  // namespace cptdp
