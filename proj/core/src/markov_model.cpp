#include "cptdp/markov_model.hpp"

#include "cptdp/weighting.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cptdp {

MarkovModel::MarkovModel(std::vector<std::string> state_names, std::vector<std::vector<Action>> actions,
                         double cost_bound, ModelMode mode, std::optional<ValueFunction> terminal)
    : state_names_(std::move(state_names)),
      actions_(std::move(actions)),
      cost_bound_(cost_bound),
      mode_(mode),
      terminal_(terminal ? std::move(*terminal) : ValueFunction::zeros(state_names_.size())) {
  if (actions_.size() != state_names_.size()) {
    throw std::invalid_argument("MarkovModel: one action list per state is required");
  }
}

std::optional<StateIndex> MarkovModel::find_state(const std::string& name) const {
  for (StateIndex x = 0; x < state_names_.size(); ++x) {
    if (state_names_[x] == name) return x;
  }
  return std::nullopt;
}

std::optional<StateIndex> MarkovModel::absorbing_state() const {
  if (const auto* t = std::get_if<Transient>(&mode_)) return t->absorbing;
  return std::nullopt;
}

bool MarkovModel::is_absorbing(StateIndex x) const {
  const auto a = absorbing_state();
  return a && *a == x;
}

double MarkovModel::continuation_factor() const {
  if (const auto* d = std::get_if<Discounted>(&mode_)) return d->alpha;
  return 1.0;
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kEmptyStateSet: return "empty_state_set";
    case ViolationKind::kNoActions: return "no_actions";
    case ViolationKind::kNoOutcomes: return "no_outcomes";
    case ViolationKind::kBadSuccessor: return "bad_successor";
    case ViolationKind::kBadMass: return "bad_mass";
    case ViolationKind::kNormalization: return "normalization";
    case ViolationKind::kCostBound: return "cost_bound";
    case ViolationKind::kBadCostBound: return "bad_cost_bound";
    case ViolationKind::kBadDiscount: return "bad_discount";
    case ViolationKind::kBadAbsorbingState: return "bad_absorbing_state";
    case ViolationKind::kAbsorbingTransition: return "absorbing_transition";
    case ViolationKind::kAbsorbingCost: return "absorbing_cost";
    case ViolationKind::kBadTerminal: return "bad_terminal";
  }
  return "unknown";
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream out;
  out << violations.size() << " violation(s); first: [" << to_string(violations.front().kind) << "] "
      << violations.front().message;
  return out.str();
}

ValidationReport validate_model(const MarkovModel& model) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::optional<StateIndex> x, std::optional<std::size_t> a,
                 std::optional<std::size_t> d, std::string message) {
    report.violations.push_back({kind, x, a, d, std::move(message)});
  };
  auto where = [&](StateIndex x, std::optional<std::size_t> a = {}, std::optional<std::size_t> d = {}) {
    std::ostringstream s;
    s << "state '" << model.state_name(x) << "'";
    if (a) s << ", action " << *a << " ('" << model.actions(x)[*a].name << "')";
    if (d) s << ", outcome " << *d;
    return s.str();
  };

  const std::size_t n = model.num_states();
  if (n == 0) add(ViolationKind::kEmptyStateSet, {}, {}, {}, "model has no states");

  const double c = model.cost_bound();
  if (!(c > 0.0) || !std::isfinite(c)) {
    add(ViolationKind::kBadCostBound, {}, {}, {}, "cost bound must be positive and finite");
  }

  if (const auto* d = std::get_if<Discounted>(&model.mode())) {
    if (!(d->alpha > 0.0 && d->alpha < 1.0)) {
      add(ViolationKind::kBadDiscount, {}, {}, {}, "discount factor must lie in (0, 1)");
    }
  }
  const auto absorbing = model.absorbing_state();
  const bool absorbing_ok = !absorbing || *absorbing < n;
  if (!absorbing_ok) {
    add(ViolationKind::kBadAbsorbingState, {}, {}, {}, "absorbing state index out of range");
  }

  if (model.terminal_value().size() != n) {
    add(ViolationKind::kBadTerminal, {}, {}, {}, "terminal value has the wrong length");
  }

  for (StateIndex x = 0; x < n; ++x) {
    const auto acts = model.actions(x);
    if (acts.empty()) add(ViolationKind::kNoActions, x, {}, {}, where(x) + " has no feasible action");
    const bool at_absorbing = absorbing_ok && model.is_absorbing(x);
    for (std::size_t a = 0; a < acts.size(); ++a) {
      const auto& outs = acts[a].outcomes;
      if (outs.empty()) {
        add(ViolationKind::kNoOutcomes, x, a, {}, where(x, a) + " has no disturbance outcome");
        continue;
      }
      double total = 0.0;
      for (std::size_t d = 0; d < outs.size(); ++d) {
        const Outcome& o = outs[d];
        if (!(o.mass >= 0.0) || !std::isfinite(o.mass)) {
          add(ViolationKind::kBadMass, x, a, d, where(x, a, d) + " has a negative or non-finite mass");
        } else {
          total += o.mass;
        }
        if (o.next >= n) {
          add(ViolationKind::kBadSuccessor, x, a, d, where(x, a, d) + " leads to an unknown state");
        }
        if (!std::isfinite(o.cost) || std::abs(o.cost) > c) {
          std::ostringstream msg;
          msg << where(x, a, d) << " has |cost| = " << std::abs(o.cost) << " above the bound " << c;
          add(ViolationKind::kCostBound, x, a, d, msg.str());
        }
        if (at_absorbing) {
          if (o.next != x) {
            add(ViolationKind::kAbsorbingTransition, x, a, d,
                where(x, a, d) + " leaves the absorbing state");
          }
          if (o.cost != 0.0) {
            add(ViolationKind::kAbsorbingCost, x, a, d,
                where(x, a, d) + " charges a nonzero cost at the absorbing state");
          }
        }
      }
      if (std::abs(total - 1.0) > kProbabilityTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << where(x, a) << " has disturbance masses summing to " << total;
        add(ViolationKind::kNormalization, x, a, {}, msg.str());
      }
    }
  }
  return report;
}

void require_valid(const MarkovModel& model) {
  const auto report = validate_model(model);
  if (!report.ok()) throw std::invalid_argument("invalid model: " + report.summary());
}

void validate_action_mix(const MarkovModel& model, StateIndex x, std::span<const double> mix) {
  if (x >= model.num_states()) throw std::invalid_argument("action mix: state index out of range");
  if (mix.size() != model.num_actions(x)) {
    std::ostringstream msg;
    msg << "action mix for state '" << model.state_name(x) << "' has " << mix.size()
        << " entries, expected " << model.num_actions(x);
    throw std::invalid_argument(msg.str());
  }
  double total = 0.0;
  for (double p : mix) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("action mix has a negative or non-finite entry");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "action mix for state '" << model.state_name(x) << "' sums to " << total;
    throw std::invalid_argument(msg.str());
  }
}

void validate_policy(const MarkovModel& model, const RandomizedPolicy& policy) {
  if (policy.num_states() != model.num_states()) {
    throw std::invalid_argument("policy covers the wrong number of states");
  }
  for (StateIndex x = 0; x < model.num_states(); ++x) validate_action_mix(model, x, policy.at(x));
}

std::vector<double> vertex_mix(std::size_t num_actions, std::size_t action) {
  std::vector<double> mix(num_actions, 0.0);
  mix.at(action) = 1.0;
  return mix;
}

RandomizedPolicy uniform_policy(const MarkovModel& model) {
  std::vector<std::vector<double>> table;
  for (StateIndex x = 0; x < model.num_states(); ++x) {
    const std::size_t k = model.num_actions(x);
    table.emplace_back(k, 1.0 / static_cast<double>(k));
  }
  return RandomizedPolicy(std::move(table));
}

RandomizedPolicy deterministic_policy(const MarkovModel& model, std::span<const std::size_t> choice) {
  if (choice.size() != model.num_states()) {
    throw std::invalid_argument("deterministic_policy: one action per state is required");
  }
  std::vector<std::vector<double>> table;
  for (StateIndex x = 0; x < model.num_states(); ++x) {
    table.push_back(vertex_mix(model.num_actions(x), choice[x]));
  }
  return RandomizedPolicy(std::move(table));
}

DiscreteDistribution return_distribution(const MarkovModel& model, StateIndex x,
                                         std::span<const double> mix, const ValueFunction& J) {
  validate_action_mix(model, x, mix);
  if (J.size() != model.num_states()) {
    throw std::invalid_argument("return_distribution: value function has the wrong length");
  }
  if (model.is_absorbing(x)) {
    throw std::invalid_argument("return_distribution: undefined at the absorbing state");
  }
  const double factor = model.continuation_factor();
  const auto absorbing = model.absorbing_state();
  const auto acts = model.actions(x);

  std::vector<Atom> atoms;
  for (std::size_t a = 0; a < acts.size(); ++a) {
    for (const Outcome& o : acts[a].outcomes) {
      if (absorbing && o.next == *absorbing) continue;
      atoms.push_back({o.cost + factor * J[o.next], mix[a] * o.mass});
    }
  }
  if (absorbing) return DiscreteDistribution::sub_normalized(std::move(atoms));
  return DiscreteDistribution::proper(std::move(atoms));
}

}  // namespace cptdp
