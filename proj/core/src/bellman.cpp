#include "cptdp/bellman.hpp"

#include "cptdp/cpt_value.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cptdp {

namespace {

// The operator always evaluates the functional around 0.
const CptSpec& centered(const CptSpec& spec, CptSpec& storage) {
  if (spec.reference_point == 0.0) return spec;
  storage = spec.with_reference(0.0);
  return storage;
}

double h_value(const MarkovModel& model, StateIndex x, std::span<const double> mix, const ValueFunction& J,
               const CptSpec& spec0) {
  if (model.is_absorbing(x)) return 0.0;
  return cpt_parts(return_distribution(model, x, mix, J), spec0).value();
}

bool strictly_better(double candidate, double incumbent) {
  return candidate < incumbent - 1e-13 * std::max(1.0, std::abs(incumbent));
}

// All compositions of m into k parts, in ascending lexicographic order of
// the resulting mix vector.
template <class Fn>
void for_each_grid_mix(std::size_t k, std::size_t m, Fn&& fn) {
  std::vector<std::size_t> counts(k, 0);
  std::vector<double> mix(k, 0.0);
  const double step = 1.0 / static_cast<double>(m);
  auto recurse = [&](auto&& self, std::size_t pos, std::size_t remaining) -> void {
    if (pos + 1 == k) {
      counts[pos] = remaining;
      for (std::size_t i = 0; i < k; ++i) mix[i] = static_cast<double>(counts[i]) * step;
      fn(mix, counts);
      return;
    }
    for (std::size_t c = 0; c <= remaining; ++c) {
      counts[pos] = c;
      self(self, pos + 1, remaining - c);
    }
  };
  recurse(recurse, 0, m);
}

}  // namespace

void SolveConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("SolveConfig: tol must be positive");
  if (simplex_resolution == 0) throw std::invalid_argument("SolveConfig: simplex_resolution must be >= 1");
}

double apply_H(const MarkovModel& model, StateIndex x, std::span<const double> mix, const ValueFunction& J,
               const CptSpec& spec) {
  validate_action_mix(model, x, mix);
  CptSpec storage;
  return h_value(model, x, mix, J, centered(spec, storage));
}

namespace {

BellmanMin minimize_at(const MarkovModel& model, StateIndex x, const ValueFunction& J, const CptSpec& spec0,
                       const SolveConfig& cfg) {
  const std::size_t k = model.num_actions(x);
  if (model.is_absorbing(x)) return {0.0, vertex_mix(k, 0)};

  BellmanMin best{0.0, vertex_mix(k, 0)};
  best.value = h_value(model, x, best.mix, J, spec0);
  for (std::size_t a = 1; a < k; ++a) {
    auto mix = vertex_mix(k, a);
    const double v = h_value(model, x, mix, J, spec0);
    if (strictly_better(v, best.value)) best = {v, std::move(mix)};
  }
  if (cfg.deterministic_only || k == 1) return best;

  const std::size_t m = cfg.simplex_resolution;
  if (m > 1) {
    for_each_grid_mix(k, m, [&](const std::vector<double>& mix, const std::vector<std::size_t>& counts) {
      if (std::find(counts.begin(), counts.end(), m) != counts.end()) return;  // vertex, done above
      const double v = h_value(model, x, mix, J, spec0);
      if (strictly_better(v, best.value)) best = {v, mix};
    });
  }

  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  std::vector<double> trial(k);
  double radius = 1.0 / static_cast<double>(m);
  for (std::size_t pass = 0; pass < cfg.refine_steps; ++pass, radius *= 0.5) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        // Move t units of mass from action j to action i.
        const double lo = std::max(-best.mix[i], -radius);
        const double hi = std::min(best.mix[j], radius);
        if (!(hi - lo > 1e-15)) continue;
        auto along = [&](double t) {
          trial = best.mix;
          trial[i] = std::max(0.0, trial[i] + t);
          trial[j] = std::max(0.0, trial[j] - t);
          return h_value(model, x, trial, J, spec0);
        };
        double a = lo;
        double b = hi;
        double c = b - golden * (b - a);
        double d = a + golden * (b - a);
        double fc = along(c);
        double fd = along(d);
        for (int it = 0; it < 40; ++it) {
          if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = along(c);
          } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = along(d);
          }
        }
        double t_best = fc < fd ? c : d;
        double f_best = std::min(fc, fd);
        for (double t : {lo, hi}) {
          const double f = along(t);
          if (f < f_best) {
            f_best = f;
            t_best = t;
          }
        }
        if (strictly_better(f_best, best.value)) {
          along(t_best);
          best = {f_best, trial};
        }
      }
    }
  }
  return best;
}

}  // namespace

BellmanMin bellman_min(const MarkovModel& model, StateIndex x, const ValueFunction& J, const CptSpec& spec,
                       const SolveConfig& cfg) {
  cfg.validate();
  if (x >= model.num_states()) throw std::invalid_argument("bellman_min: state index out of range");
  CptSpec storage;
  return minimize_at(model, x, J, centered(spec, storage), cfg);
}

ValueFunction apply_policy_operator(const MarkovModel& model, const RandomizedPolicy& policy,
                                    const ValueFunction& J, const CptSpec& spec) {
  validate_policy(model, policy);
  CptSpec storage;
  const CptSpec& spec0 = centered(spec, storage);
  std::vector<double> out(model.num_states(), 0.0);
  for (StateIndex x = 0; x < model.num_states(); ++x) out[x] = h_value(model, x, policy.at(x), J, spec0);
  return ValueFunction(std::move(out));
}

ValueFunction apply_bellman_operator(const MarkovModel& model, const ValueFunction& J, const CptSpec& spec,
                                     const SolveConfig& cfg, RandomizedPolicy* minimizers) {
  cfg.validate();
  CptSpec storage;
  const CptSpec& spec0 = centered(spec, storage);
  std::vector<double> out(model.num_states(), 0.0);
  std::vector<std::vector<double>> mixes(model.num_states());
  for (StateIndex x = 0; x < model.num_states(); ++x) {
    auto res = minimize_at(model, x, J, spec0, cfg);
    out[x] = res.value;
    mixes[x] = std::move(res.mix);
  }
  if (minimizers) *minimizers = RandomizedPolicy(std::move(mixes));
  return ValueFunction(std::move(out));
}

SolveResult value_iteration(const MarkovModel& model, const CptSpec& spec, const ValueFunction& J0,
                            const SolveConfig& cfg) {
  cfg.validate();
  if (J0.size() != model.num_states()) {
    throw std::invalid_argument("value_iteration: initial value has the wrong length");
  }
  SolveResult result;
  ValueFunction J = J0;
  if (const auto a = model.absorbing_state()) J[*a] = 0.0;

  RandomizedPolicy mixes = uniform_policy(model);
  while (result.trace.size() < cfg.max_iter) {
    ValueFunction next = apply_bellman_operator(model, J, spec, cfg, &mixes);
    // Residual reduced in state order so the value does not depend on how the
    // sweep is scheduled.
    const double residual = sup_distance(next, J);
    J = std::move(next);
    result.trace.push_back(residual);
    if (residual <= cfg.tol) {
      result.converged = true;
      break;
    }
  }
  result.iterations = result.trace.size();
  result.value = std::move(J);
  result.policy = std::move(mixes);
  return result;
}

SolveResult value_iteration(const MarkovModel& model, const CptSpec& spec, const SolveConfig& cfg) {
  return value_iteration(model, spec, model.terminal_value(), cfg);
}

}  // namespace cptdp
