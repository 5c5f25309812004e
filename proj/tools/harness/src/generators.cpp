#include "cptdp/harness/generators.hpp"

#include "cptdp/random.hpp"
#include "cptdp/serialization.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cptdp::harness {

namespace {

struct KindName {
  std::string operator()(const RandomMdp&) const { return "random_mdp"; }
  std::string operator()(const Gridworld&) const { return "gridworld"; }
  std::string operator()(const CraftedRandomizedOptimality&) const { return "crafted_randomized_optimality"; }
};

// Masses that sum to 1 in floating point: the last entry takes the remainder.
std::vector<double> normalized_masses(Rng& rng, std::size_t k, double floor_mass) {
  std::vector<double> p = rng.simplex_point(k);
  const double scale = 1.0 - floor_mass * static_cast<double>(k);
  for (double& e : p) e = floor_mass + scale * e;
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) head += p[i];
  p.back() = 1.0 - head;
  return p;
}

}  // namespace

std::string kind_name(const InstanceGenerator& gen) { return std::visit(KindName{}, gen); }

MarkovModel random_mdp(const RandomMdp& params, std::uint64_t seed) {
  if (params.n_states == 0 || params.n_actions == 0 || params.n_disturbances == 0) {
    throw std::invalid_argument("random_mdp: sizes must be positive");
  }
  if (!(params.cost_lo <= params.cost_hi)) throw std::invalid_argument("random_mdp: empty cost range");
  const double c = std::max({std::abs(params.cost_lo), std::abs(params.cost_hi), 1e-9});

  Rng rng(seed);
  const bool transient = std::holds_alternative<Transient>(params.mode);
  const std::size_t n = params.n_states + (transient ? 1 : 0);
  std::vector<std::string> names;
  for (std::size_t x = 0; x < params.n_states; ++x) names.push_back("s" + std::to_string(x));
  if (transient) names.push_back("goal");

  std::vector<std::vector<Action>> actions(n);
  for (std::size_t x = 0; x < params.n_states; ++x) {
    for (std::size_t a = 0; a < params.n_actions; ++a) {
      Action act{"a" + std::to_string(a), {}};
      const auto masses = normalized_masses(rng, params.n_disturbances, 0.01 / params.n_disturbances);
      for (std::size_t d = 0; d < params.n_disturbances; ++d) {
        // In transient mode the first disturbance always reaches the goal, so
        // every action leaves with probability at least 0.01 / n_disturbances.
        const StateIndex next = transient && d == 0 ? n - 1 : rng.index(params.n_states);
        act.outcomes.push_back({masses[d], next, rng.uniform(params.cost_lo, params.cost_hi), "d" + std::to_string(d)});
      }
      actions[x].push_back(std::move(act));
    }
  }
  ModelMode mode = params.mode;
  if (transient) {
    mode = Transient{n - 1};
    actions[n - 1].push_back({"stay", {{1.0, n - 1, 0.0, "stay"}}});
  }
  MarkovModel model(std::move(names), std::move(actions), c, mode);
  require_valid(model);
  return model;
}

MarkovModel gridworld(const Gridworld& params) {
  if (params.width == 0 || params.height == 0 || params.width * params.height < 2) {
    throw std::invalid_argument("gridworld: needs at least two cells");
  }
  if (!(params.noise >= 0.0 && params.noise <= 1.0)) throw std::invalid_argument("gridworld: noise must lie in [0, 1]");
  if (!(params.step_cost > 0.0)) throw std::invalid_argument("gridworld: step cost must be positive");

  const std::size_t w = params.width;
  const std::size_t h = params.height;
  const std::size_t n = w * h;
  const StateIndex goal = n - 1;
  auto cell = [&](std::size_t col, std::size_t row) { return row * w + col; };

  struct Move {
    const char* name;
    int dc;
    int dr;
  };
  const Move moves[4] = {{"up", 0, -1}, {"down", 0, 1}, {"left", -1, 0}, {"right", 1, 0}};
  auto target = [&](std::size_t col, std::size_t row, const Move& m) {
    const long c2 = static_cast<long>(col) + m.dc;
    const long r2 = static_cast<long>(row) + m.dr;
    if (c2 < 0 || r2 < 0 || c2 >= static_cast<long>(w) || r2 >= static_cast<long>(h)) return cell(col, row);
    return cell(static_cast<std::size_t>(c2), static_cast<std::size_t>(r2));
  };

  std::vector<std::string> names(n);
  std::vector<std::vector<Action>> actions(n);
  for (std::size_t row = 0; row < h; ++row) {
    for (std::size_t col = 0; col < w; ++col) {
      const StateIndex x = cell(col, row);
      names[x] = x == goal ? "goal" : "c" + std::to_string(col) + "_" + std::to_string(row);
      if (x == goal) {
        actions[x].push_back({"stay", {{1.0, x, 0.0, "stay"}}});
        continue;
      }
      for (const Move& intended : moves) {
        Action act{intended.name, {}};
        for (const Move& actual : moves) {
          double mass = params.noise / 4.0;
          if (&actual == &intended) mass += 1.0 - params.noise;
          act.outcomes.push_back({mass, target(col, row, actual), params.step_cost, actual.name});
        }
        actions[x].push_back(std::move(act));
      }
    }
  }
  // The four masses above are exact sums of the same two terms, but guard
  // against rounding anyway.
  for (auto& acts : actions) {
    for (Action& a : acts) {
      double head = 0.0;
      for (std::size_t i = 0; i + 1 < a.outcomes.size(); ++i) head += a.outcomes[i].mass;
      a.outcomes.back().mass = 1.0 - head;
    }
  }
  MarkovModel model(std::move(names), std::move(actions), params.step_cost, Transient{goal});
  require_valid(model);
  return model;
}

MarkovModel crafted_randomized_optimality() {
  std::vector<Action> acts{
      {"a0", {{0.26, 0, 4.0, "high"}, {0.74, 0, 1.0, "low"}}},
      {"a1", {{0.42, 0, 0.0, "zero"}, {0.58, 0, 4.0, "high"}}},
  };
  MarkovModel model({"s"}, {std::move(acts)}, 4.0, Discounted{0.9});
  require_valid(model);
  return model;
}

CptSpec crafted_spec() {
  CptSpec spec = CptSpec::risk_neutral();
  spec.w_plus = WeightingFunction::tversky_kahneman(0.61);
  spec.w_minus = WeightingFunction::tversky_kahneman(0.69);
  return spec;
}

MarkovModel generate(const InstanceGenerator& gen, std::uint64_t seed) {
  if (const auto* r = std::get_if<RandomMdp>(&gen)) return random_mdp(*r, seed);
  if (const auto* g = std::get_if<Gridworld>(&gen)) return gridworld(*g);
  return crafted_randomized_optimality();
}

CorpusConfig parse_corpus_config(const std::string& json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError("", std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("", "generator config must be an object");

  auto number = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw FormatError(key, "expected a number");
    return j[key].get<double>();
  };
  auto count = [&](const char* key, std::size_t fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_unsigned() || j[key].get<std::size_t>() == 0) {
      throw FormatError(key, "expected a positive integer");
    }
    return j[key].get<std::size_t>();
  };

  if (!j.contains("kind") || !j["kind"].is_string()) throw FormatError("kind", "missing generator kind");
  const std::string kind = j["kind"].get<std::string>();
  CorpusConfig cfg;
  cfg.count = count("count", 1);

  if (kind == "random_mdp") {
    RandomMdp r;
    r.n_states = count("n_states", r.n_states);
    r.n_actions = count("n_actions", r.n_actions);
    r.n_disturbances = count("n_disturbances", r.n_disturbances);
    if (j.contains("cost_range")) {
      const auto& cr = j["cost_range"];
      if (!cr.is_array() || cr.size() != 2 || !cr[0].is_number() || !cr[1].is_number() ||
          cr[0].get<double>() > cr[1].get<double>()) {
        throw FormatError("cost_range", "expected [lo, hi] with lo <= hi");
      }
      r.cost_lo = cr[0].get<double>();
      r.cost_hi = cr[1].get<double>();
    }
    if (j.contains("mode")) {
      const auto& m = j["mode"];
      const std::string type = m.is_object() && m.contains("type") && m["type"].is_string()
                                   ? m["type"].get<std::string>()
                                   : std::string();
      if (type == "discounted") {
        if (!m.contains("alpha") || !m["alpha"].is_number()) throw FormatError("mode.alpha", "expected a number");
        const double alpha = m["alpha"].get<double>();
        if (!(alpha > 0.0 && alpha < 1.0)) throw FormatError("mode.alpha", "must lie in (0, 1)");
        r.mode = Discounted{alpha};
      } else if (type == "transient") {
        r.mode = Transient{0};
      } else {
        throw FormatError("mode.type", "expected \"discounted\" or \"transient\"");
      }
    }
    cfg.generator = r;
  } else if (kind == "gridworld") {
    Gridworld g;
    g.width = count("width", g.width);
    g.height = count("height", g.height);
    g.step_cost = number("step_cost", g.step_cost);
    g.noise = number("noise", g.noise);
    if (!(g.step_cost > 0.0)) throw FormatError("step_cost", "must be positive");
    if (!(g.noise >= 0.0 && g.noise <= 1.0)) throw FormatError("noise", "must lie in [0, 1]");
    cfg.generator = g;
  } else if (kind == "crafted_randomized_optimality") {
    cfg.generator = CraftedRandomizedOptimality{};
  } else {
    throw FormatError("kind", "unknown generator kind '" + kind + "'");
  }
  return cfg;
}

}  // namespace cptdp::harness
