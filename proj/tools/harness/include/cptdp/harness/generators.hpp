#pragma once

#include "cptdp/cpt_spec.hpp"
#include "cptdp/markov_model.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace cptdp::harness {

struct RandomMdp {
  std::size_t n_states = 20;
  std::size_t n_actions = 4;
  std::size_t n_disturbances = 3;
  double cost_lo = -1.0;
  double cost_hi = 1.0;
  ModelMode mode = Discounted{0.9};  ///< for Transient the absorbing index is ignored; the last state absorbs
};

/// Grid with the goal (absorbing) in the far corner. Each move succeeds with
/// probability 1 - noise and otherwise goes in a uniformly random direction;
/// moves into a wall stay put. Every step costs step_cost.
struct Gridworld {
  std::size_t width = 5;
  std::size_t height = 5;
  double step_cost = 1.0;
  double noise = 0.1;
};

/// One state, two actions, discounted: under TK weighting a strict mix of
/// the two actions has lower CPT cost than either action alone.
struct CraftedRandomizedOptimality {};

using InstanceGenerator = std::variant<RandomMdp, Gridworld, CraftedRandomizedOptimality>;

std::string kind_name(const InstanceGenerator& gen);

/// Pure function of (generator, seed); generated models pass validate_model.
MarkovModel generate(const InstanceGenerator& gen, std::uint64_t seed);

MarkovModel random_mdp(const RandomMdp& params, std::uint64_t seed);
MarkovModel gridworld(const Gridworld& params);
MarkovModel crafted_randomized_optimality();

/// Spec under which the crafted instance prefers a mix: identity utilities,
/// TK weightings with delta 0.61 (gains) and 0.69 (losses).
CptSpec crafted_spec();

/// {"kind": "random_mdp" | "gridworld" | "crafted_randomized_optimality", ...}
/// plus an optional "count" (instances to generate, default 1).
struct CorpusConfig {
  InstanceGenerator generator;
  std::size_t count = 1;
};

CorpusConfig parse_corpus_config(const std::string& json_text);

}  // namespace cptdp::harness
