#pragma once

#include <span>
#include <vector>

namespace cptdp {

using StateIndex = std::size_t;

/// Bounded real function on the state set, compared in sup-norm.
class ValueFunction {
 public:
  ValueFunction() = default;
  /// Throws std::invalid_argument on non-finite entries.
  explicit ValueFunction(std::vector<double> values);
  static ValueFunction zeros(std::size_t n) { return ValueFunction(std::vector<double>(n, 0.0)); }

  std::size_t size() const { return values_.size(); }
  double operator[](StateIndex x) const { return values_[x]; }
  double& operator[](StateIndex x) { return values_[x]; }
  std::span<const double> values() const { return values_; }

  double sup_norm() const;

 private:
  std::vector<double> values_;
};

/// max_x |a(x) - b(x)|; sizes must agree.
double sup_distance(const ValueFunction& a, const ValueFunction& b);

/// Stationary randomized policy: for every state a probability vector over
/// that state's feasible actions (indexed as in the model).
class RandomizedPolicy {
 public:
  RandomizedPolicy() = default;
  explicit RandomizedPolicy(std::vector<std::vector<double>> per_state)
      : per_state_(std::move(per_state)) {}

  std::size_t num_states() const { return per_state_.size(); }
  std::span<const double> at(StateIndex x) const { return per_state_[x]; }
  const std::vector<std::vector<double>>& table() const { return per_state_; }

 private:
  std::vector<std::vector<double>> per_state_;
};

}  // namespace cptdp
