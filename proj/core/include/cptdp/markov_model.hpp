#pragma once

#include "cptdp/distribution.hpp"
#include "cptdp/value_function.hpp"

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace cptdp {

/// One disturbance outcome of a (state, action) pair: its probability, the
/// successor f(x, a, d) and the stage cost g(x, a, d).
struct Outcome {
  double mass;
  StateIndex next;
  double cost;
  std::string label;
};

struct Action {
  std::string name;
  std::vector<Outcome> outcomes;
};

struct Discounted {
  double alpha;
};

struct Transient {
  StateIndex absorbing;
};

using ModelMode = std::variant<Discounted, Transient>;

/// Finite Markov control model. Construction does not validate; run
/// validate_model before handing a model to the solvers.
class MarkovModel {
 public:
  MarkovModel() = default;
  MarkovModel(std::vector<std::string> state_names, std::vector<std::vector<Action>> actions,
              double cost_bound, ModelMode mode, std::optional<ValueFunction> terminal = std::nullopt);

  std::size_t num_states() const { return state_names_.size(); }
  const std::string& state_name(StateIndex x) const { return state_names_[x]; }
  std::optional<StateIndex> find_state(const std::string& name) const;

  std::span<const Action> actions(StateIndex x) const { return actions_[x]; }
  std::size_t num_actions(StateIndex x) const { return actions_[x].size(); }

  double cost_bound() const { return cost_bound_; }
  const ModelMode& mode() const { return mode_; }
  bool is_transient() const { return std::holds_alternative<Transient>(mode_); }
  std::optional<StateIndex> absorbing_state() const;
  bool is_absorbing(StateIndex x) const;
  /// alpha in discounted mode, 1 in transient mode.
  double continuation_factor() const;

  /// The starting element for value iteration (zero unless given).
  const ValueFunction& terminal_value() const { return terminal_; }

 private:
  std::vector<std::string> state_names_;
  std::vector<std::vector<Action>> actions_;
  double cost_bound_ = 0.0;
  ModelMode mode_ = Discounted{0.9};
  ValueFunction terminal_;
};

enum class ViolationKind {
  kEmptyStateSet,
  kNoActions,
  kNoOutcomes,
  kBadSuccessor,
  kBadMass,
  kNormalization,
  kCostBound,
  kBadCostBound,
  kBadDiscount,
  kBadAbsorbingState,
  kAbsorbingTransition,
  kAbsorbingCost,
  kBadTerminal,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::optional<StateIndex> state;
  std::optional<std::size_t> action;
  std::optional<std::size_t> outcome;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

/// Every broken structural invariant of the model, each with the offending
/// (state, action, outcome) where one applies.
ValidationReport validate_model(const MarkovModel& model);

/// Throws std::invalid_argument with the first violation when the model is
/// not valid.
void require_valid(const MarkovModel& model);

/// Throws std::invalid_argument unless `mix` is a probability vector over the
/// actions of state x.
void validate_action_mix(const MarkovModel& model, StateIndex x, std::span<const double> mix);
void validate_policy(const MarkovModel& model, const RandomizedPolicy& policy);

RandomizedPolicy uniform_policy(const MarkovModel& model);
/// Policy putting all mass on `choice[x]` in every state.
RandomizedPolicy deterministic_policy(const MarkovModel& model, std::span<const std::size_t> choice);
std::vector<double> vertex_mix(std::size_t num_actions, std::size_t action);

/// Law of Z = g(x, a, d) + c * J(f(x, a, d)) with a ~ mix and d ~ P(.|x, a),
/// where c is the discount in discounted mode and 1 in transient mode. In
/// transient mode outcomes entering the absorbing state are left out, giving
/// a sub-normalized law. Atoms are listed action by action, outcome by
/// outcome, including zero-mass ones, so that atom lists for different mixes
/// line up.
DiscreteDistribution return_distribution(const MarkovModel& model, StateIndex x,
                                         std::span<const double> mix, const ValueFunction& J);

}  // namespace cptdp
