#pragma once

#include "cptdp/cpt_spec.hpp"
#include "cptdp/markov_model.hpp"

#include <vector>

namespace cptdp {

struct SolveConfig {
  double tol = 1e-9;                   ///< sup-norm residual at which to stop
  std::size_t max_iter = 10000;
  std::size_t simplex_resolution = 8;  ///< grid of mixes with spacing 1/m
  std::size_t refine_steps = 2;        ///< golden-section passes around the incumbent
  bool deterministic_only = false;

  /// Throws std::invalid_argument on tol <= 0 or simplex_resolution == 0.
  void validate() const;
};

struct SolveResult {
  ValueFunction value;
  RandomizedPolicy policy;     ///< minimizing mixes of the final sweep
  std::vector<double> trace;   ///< residual of every sweep
  std::size_t iterations = 0;
  bool converged = false;
};

/// H(x, mix, J): the CPT functional (reference point 0, the CptSpec's
/// utilities and weightings) of the one-step return law from
/// return_distribution. Zero at the absorbing state.
double apply_H(const MarkovModel& model, StateIndex x, std::span<const double> mix, const ValueFunction& J,
               const CptSpec& spec);

struct BellmanMin {
  double value;
  std::vector<double> mix;
};

/// Approximate minimum of apply_H over the action simplex of state x:
/// vertices, then the grid of mixes with spacing 1/m, then `refine_steps`
/// passes of golden-section search along every pairwise mass transfer
/// e_i - e_j around the incumbent. A candidate replaces the incumbent only
/// when strictly better (by more than a 1e-13 relative margin), so ties go to
/// the lowest-index vertex and then to the lexicographically smallest grid
/// mix.
BellmanMin bellman_min(const MarkovModel& model, StateIndex x, const ValueFunction& J, const CptSpec& spec,
                       const SolveConfig& cfg);

/// (T_mu J)(x) = H(x, mu(x), J) for every state.
ValueFunction apply_policy_operator(const MarkovModel& model, const RandomizedPolicy& policy,
                                    const ValueFunction& J, const CptSpec& spec);

/// (T J)(x) = min over mixes of H(x, mix, J), with the minimizing mixes.
ValueFunction apply_bellman_operator(const MarkovModel& model, const ValueFunction& J, const CptSpec& spec,
                                     const SolveConfig& cfg, RandomizedPolicy* minimizers = nullptr);

/// J_{k+1} = T J_k from J0 until the sup-norm residual is <= tol or max_iter
/// sweeps have run. J(x_A) is held at 0 in transient mode. Running out of
/// iterations is reported through `converged`, not thrown.
SolveResult value_iteration(const MarkovModel& model, const CptSpec& spec, const ValueFunction& J0,
                            const SolveConfig& cfg);

/// Same, starting from the model's terminal value.
SolveResult value_iteration(const MarkovModel& model, const CptSpec& spec, const SolveConfig& cfg);

}  // namespace cptdp
