#include "cptdp/diagnostics.hpp"

#include "cptdp/random.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cptdp {

namespace {

double value_range(const MarkovModel& model) {
  const double c = model.cost_bound();
  if (const auto* d = std::get_if<Discounted>(&model.mode())) return c / (1.0 - d->alpha);
  return 10.0 * c;
}

ValueFunction random_value(const MarkovModel& model, Rng& rng, double range) {
  std::vector<double> v(model.num_states());
  for (double& e : v) e = rng.uniform(-range, range);
  if (const auto a = model.absorbing_state()) v[*a] = 0.0;
  return ValueFunction(std::move(v));
}

RandomizedPolicy random_policy(const MarkovModel& model, Rng& rng) {
  std::vector<std::vector<double>> table;
  for (StateIndex x = 0; x < model.num_states(); ++x) table.push_back(rng.simplex_point(model.num_actions(x)));
  return RandomizedPolicy(std::move(table));
}

// J' for trial t: even trials shift J uniformly, odd trials perturb each
// entry independently.
ValueFunction partner_value(const MarkovModel& model, const ValueFunction& J, Rng& rng, double range,
                            std::size_t t) {
  std::vector<double> v(J.values().begin(), J.values().end());
  const double scale = range * (0.05 + 0.95 * rng.uniform());
  if (t % 2 == 0) {
    const double s = rng.uniform() < 0.5 ? -scale : scale;
    for (double& e : v) e += s;
  } else {
    for (double& e : v) e += rng.uniform(-scale, scale);
  }
  if (const auto a = model.absorbing_state()) v[*a] = 0.0;
  return ValueFunction(std::move(v));
}

std::optional<std::string> utility_conditions(const CptSpec& spec) {
  std::vector<std::string> problems;
  if (!spec.u_plus.has_bounded_derivative()) {
    problems.push_back("u_plus'(0) is unbounded (" + spec.u_plus.describe() + ")");
  }
  if (!spec.u_minus.has_bounded_derivative()) {
    problems.push_back("u_minus'(0) is unbounded (" + spec.u_minus.describe() + ")");
  }
  if (problems.empty()) return std::nullopt;
  std::string out;
  for (const auto& p : problems) out += (out.empty() ? "" : "; ") + p;
  return out;
}

std::optional<std::string> weighting_conditions(const CptSpec& spec) {
  if (!spec.w_plus.is_checked()) return "w_plus is not a validated probability weighting function";
  if (!spec.w_minus.is_checked()) return "w_minus is not a validated probability weighting function";
  return std::nullopt;
}

}  // namespace

MonotonicityReport monotonicity_probe(const MarkovModel& model, const CptSpec& spec, std::size_t trials,
                                      std::uint64_t seed) {
  require_valid(model);
  MonotonicityReport report;
  std::vector<StateIndex> candidates;
  for (StateIndex x = 0; x < model.num_states(); ++x) {
    if (!model.is_absorbing(x)) candidates.push_back(x);
  }
  if (candidates.empty()) return report;

  Rng rng(derive_seed(seed, 0));
  const double range = value_range(model);
  for (std::size_t t = 0; t < trials; ++t) {
    const StateIndex x = candidates[rng.index(candidates.size())];
    const std::size_t k = model.num_actions(x);
    std::vector<double> mix = rng.uniform() < 0.25 ? vertex_mix(k, rng.index(k)) : rng.simplex_point(k);

    ValueFunction J = random_value(model, rng, range);
    std::vector<double> up(J.values().begin(), J.values().end());
    for (double& e : up) {
      if (rng.uniform() < 0.5) e += rng.uniform(0.0, range);
    }
    const ValueFunction Jp(std::move(up));

    const double lo = apply_H(model, x, mix, J, spec);
    const double hi = apply_H(model, x, mix, Jp, spec);
    ++report.trials;
    if (lo > hi + 1e-10) report.violations.push_back({x, std::move(mix), lo, hi});
  }
  return report;
}

std::vector<DiscreteDistribution> default_z_family(double c, double scale) {
  if (!(c > 0.0) || !(scale > 0.0)) throw std::invalid_argument("default_z_family: c and scale must be positive");
  const double top = c * scale;
  std::vector<DiscreteDistribution> family;
  for (int k = 0; k <= 20; ++k) family.push_back(DiscreteDistribution::point_mass(top * k / 20.0));
  // Two-point masses: a uniform 1/1000 grid plus log-spaced values towards
  // both ends, where TK-type weightings put the sup of the condition.
  std::vector<double> qs;
  for (int q = 1; q < 1000; ++q) qs.push_back(q / 1000.0);
  for (int i = 0; i < 1200; ++i) {
    const double q = std::pow(10.0, -6.0 + (6.0 + std::log10(0.5)) * i / 1200.0);
    qs.push_back(q);
    qs.push_back(1.0 - q);
  }
  for (double frac : {0.125, 0.25, 0.5, 0.75, 1.0}) {
    const double a = top * frac;
    for (double p : qs) family.push_back(DiscreteDistribution::proper({{0.0, 1.0 - p}, {a, p}}));
  }
  for (double frac : {0.25, 0.5, 1.0}) {
    const double t = top * frac;
    for (int k : {2, 5, 10, 50}) {
      std::vector<Atom> atoms;
      for (int i = 0; i < k; ++i) atoms.push_back({t * (i + 0.5) / k, 1.0 / k});
      // 1/k summed k times can miss 1 by a few ulps; fold the remainder in.
      double total = 0.0;
      for (const Atom& a : atoms) total += a.mass;
      atoms.back().mass += 1.0 - total;
      family.push_back(DiscreteDistribution::proper(std::move(atoms)));
    }
  }
  return family;
}

std::vector<double> default_levels(double c) { return {0.25 * c, 0.5 * c, c}; }

ContractionCheck contraction_condition_check(const CptSpec& spec, double alpha, double c,
                                             const std::vector<DiscreteDistribution>& z_family,
                                             const std::vector<double>& levels_in) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("contraction check: alpha must lie in (0, 1)");
  if (!(c > 0.0)) throw std::invalid_argument("contraction check: c must be positive");

  ContractionCheck result;
  if (auto w = weighting_conditions(spec)) {
    result.structural_failure = "condition 1: " + *w;
    return result;
  }
  if (auto u = utility_conditions(spec)) {
    result.structural_failure = "condition 2: " + *u;
    return result;
  }

  const std::vector<double> levels = levels_in.empty() ? default_levels(c) : levels_in;
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 15>;

  result.beta_hat = -1.0;
  for (std::size_t idx = 0; idx < z_family.size(); ++idx) {
    const auto atoms = z_family[idx].atoms();
    for (double level : levels) {
      const double top = alpha * level;
      std::vector<double> cuts{0.0, top};
      for (const Atom& a : atoms) {
        if (a.value > 0.0 && a.value < top) cuts.push_back(a.value);
      }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

      auto integrand = [&](double z) {
        double below = 0.0;
        double above = 0.0;
        for (const Atom& a : atoms) {
          if (a.value < z) below += a.mass;
          if (a.value > z) above += a.mass;
        }
        return spec.w_plus(std::min(below, 1.0)) * spec.u_plus.derivative(top - z) +
               spec.w_minus(std::min(above, 1.0)) * spec.u_minus.derivative(z);
      };

      double integral = 0.0;
      for (std::size_t i = 1; i < cuts.size(); ++i) {
        double err = 0.0;
        integral += Quadrature::integrate(integrand, cuts[i - 1], cuts[i], 15, 1e-12, &err);
      }
      const double ratio = integral / level;
      if (ratio > result.beta_hat) {
        result.beta_hat = ratio;
        result.worst_index = idx;
        result.worst_level = level;
      }
    }
  }
  result.pass = result.beta_hat < 1.0;
  return result;
}

ModulusEstimate empirical_contraction_modulus(const MarkovModel& model, const CptSpec& spec, std::size_t trials,
                                              std::uint64_t seed) {
  require_valid(model);
  ModulusEstimate est;
  Rng rng(derive_seed(seed, 1));
  const double range = value_range(model);
  for (std::size_t t = 0; t < trials; ++t) {
    const ValueFunction J = random_value(model, rng, range);
    const ValueFunction Jp = partner_value(model, J, rng, range, t);
    const RandomizedPolicy mu = random_policy(model, rng);
    const double gap = sup_distance(J, Jp);
    if (gap == 0.0) continue;
    const double out = sup_distance(apply_policy_operator(model, mu, J, spec),
                                    apply_policy_operator(model, mu, Jp, spec));
    est.max_ratio = std::max(est.max_ratio, out / gap);
    ++est.pairs;
  }
  return est;
}

KStepProbe k_step_contraction_probe(const MarkovModel& model, const CptSpec& spec, std::size_t k_max,
                                    std::size_t trials, std::uint64_t seed) {
  if (!model.is_transient()) throw std::invalid_argument("k_step_contraction_probe: model must be transient");
  require_valid(model);

  KStepProbe probe;
  std::vector<std::string> failures;

  probe.transience = uniform_transience_check(model, 100000, 1e-12);
  if (!probe.transience.converged) failures.push_back("condition 1: model is not certified uniformly transient");
  if (auto u = utility_conditions(spec)) failures.push_back("condition 2: " + *u);
  if (auto w = weighting_conditions(spec)) failures.push_back("condition 3: " + *w);

  const auto xi_plus = spec.w_plus.linear_bound();
  const auto xi_minus = spec.w_minus.linear_bound();
  if (xi_plus && xi_minus) {
    probe.xi = std::max(*xi_plus, *xi_minus);
  } else {
    std::ostringstream msg;
    msg << "condition 4: no finite xi with w(p) <= xi * p; w(p)/p is unbounded near 0 for "
        << (xi_plus ? "w_minus = " + spec.w_minus.describe() : "w_plus = " + spec.w_plus.describe());
    failures.push_back(msg.str());
  }

  if (!failures.empty()) {
    std::string joined;
    for (const auto& f : failures) joined += (joined.empty() ? "" : "; ") + f;
    probe.structural_failure = joined;
    return probe;
  }

  probe.moduli.assign(k_max, 0.0);
  Rng rng(derive_seed(seed, 2));
  const double range = value_range(model);
  for (std::size_t t = 0; t < trials; ++t) {
    ValueFunction J = random_value(model, rng, range);
    ValueFunction Jp = partner_value(model, J, rng, range, t);
    const RandomizedPolicy mu = random_policy(model, rng);
    const double gap = sup_distance(J, Jp);
    if (gap == 0.0) continue;
    for (std::size_t k = 0; k < k_max; ++k) {
      J = apply_policy_operator(model, mu, J, spec);
      Jp = apply_policy_operator(model, mu, Jp, spec);
      probe.moduli[k] = std::max(probe.moduli[k], sup_distance(J, Jp) / gap);
    }
  }
  for (std::size_t k = 0; k < k_max; ++k) {
    if (probe.moduli[k] < 1.0 - 1e-6) {
      probe.k = k + 1;
      break;
    }
  }
  return probe;
}

}  // namespace cptdp
