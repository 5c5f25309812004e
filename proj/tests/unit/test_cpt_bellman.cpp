#include "cptdp/bellman.hpp"
#include "cptdp/cpt_value.hpp"
#include "cptdp/diagnostics.hpp"
#include "cptdp/harness/generators.hpp"
#include "cptdp/harness/oracles.hpp"
#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace cptdp;
using Catch::Approx;

namespace {

// Values below were computed ahead of time with 50-digit arithmetic and a
// 1e-4 grid over the mix.
constexpr double kTransientH = 1.566933309532106874;
constexpr double kWitnessVertex0 = 1.8892617252421566342;
constexpr double kWitnessVertex1 = 1.8512973669640013526;
constexpr double kWitnessGridMargin = 0.12873794729659285481;
constexpr double kWitnessMix = 0.28881094209091415037;  // mass on action a1
constexpr double kBetaTk03 = 1.099145438022875372;
constexpr double kBetaTk061 = 0.90254398886011800177;

CptSpec tk_identity_u() { return harness::crafted_spec(); }

CptSpec tk_w_plus(double delta) {
  CptSpec spec;
  spec.w_plus = WeightingFunction::tversky_kahneman(delta);
  return spec;
}

MarkovModel transient_example() {
  std::vector<std::vector<Action>> acts{
      {{"go", {{0.4, 2, 1.0, "absorb"}, {0.35, 0, 2.0, "loop"}, {0.25, 1, 0.5, "side"}}}},
      {{"go", {{1.0, 2, 1.0, "absorb"}}}},
      {{"stay", {{1.0, 2, 0.0, "stay"}}}},
  };
  return MarkovModel({"s0", "s1", "A"}, acts, 2.0, Transient{2});
}

MarkovModel zero_cost(ModelMode mode) {
  std::vector<std::vector<Action>> acts{
      {{"a", {{0.5, 0, 0.0, "p"}, {0.5, 1, 0.0, "q"}}}, {"b", {{1.0, 1, 0.0, "p"}}}},
      {{"a", {{0.3, 0, 0.0, "p"}, {0.7, 2, 0.0, "q"}}}},
      {{"a", {{1.0, 2, 0.0, "p"}}}},
  };
  return MarkovModel({"x", "y", "z"}, acts, 1.0, mode);
}

MarkovModel discounted_two_state(double alpha) {
  std::vector<std::vector<Action>> acts{
      {{"stay", {{1.0, 0, 1.0, "d"}}}, {"move", {{0.8, 1, 0.5, "ok"}, {0.2, 0, 1.0, "slip"}}}},
      {{"rest", {{1.0, 1, 0.0, "d"}}}, {"work", {{0.5, 0, -1.0, "a"}, {0.5, 1, 0.25, "b"}}}},
  };
  return MarkovModel({"x", "y"}, acts, 1.0, Discounted{alpha});
}

// Single-action chains with identity components and known K.
MarkovModel chain_geometric() {
  std::vector<std::vector<Action>> acts{{{"go", {{0.5, 0, 1.0, "stay"}, {0.5, 1, 1.0, "out"}}}},
                                        {{"stay", {{1.0, 1, 0.0, "stay"}}}}};
  return MarkovModel({"s", "A"}, acts, 1.0, Transient{1});
}

MarkovModel chain_line() {
  std::vector<std::vector<Action>> acts{{{"go", {{1.0, 1, 1.0, "d"}}}},
                                        {{"go", {{1.0, 2, 1.0, "d"}}}},
                                        {{"go", {{1.0, 3, 1.0, "d"}}}},
                                        {{"stay", {{1.0, 3, 0.0, "d"}}}}};
  return MarkovModel({"s0", "s1", "s2", "A"}, acts, 1.0, Transient{3});
}

MarkovModel chain_stay_then_leave() {
  std::vector<std::vector<Action>> acts{{{"go", {{0.5, 0, 1.0, "stay"}, {0.5, 1, 1.0, "on"}}}},
                                        {{"go", {{0.5, 1, 1.0, "stay"}, {0.5, 2, 1.0, "out"}}}},
                                        {{"stay", {{1.0, 2, 0.0, "stay"}}}}};
  return MarkovModel({"s0", "s1", "A"}, acts, 1.0, Transient{2});
}

MarkovModel corrupted_fixture_model() {
  std::vector<std::vector<Action>> acts{{{"go", {{0.3, 1, 0.0, "p"}, {0.3, 2, 0.0, "q"}, {0.4, 3, 0.0, "out"}}}},
                                        {{"go", {{1.0, 3, 0.0, "out"}}}},
                                        {{"go", {{1.0, 3, 0.0, "out"}}}},
                                        {{"stay", {{1.0, 3, 0.0, "stay"}}}}};
  return MarkovModel({"s0", "s1", "s2", "A"}, acts, 1.0, Transient{3});
}

}  // namespace

TEST_CASE("apply_H examples", "[bellman]") {
  Rng rng(derive_seed(15, 0));
  const auto zero = zero_cost(Discounted{0.9});
  for (int t = 0; t < 50; ++t) {
    const auto spec = testing::random_spec(rng);
    const auto mix = rng.simplex_point(2);
    REQUIRE(apply_H(zero, 0, mix, ValueFunction::zeros(3), spec) == 0.0);
  }

  // Expectation of g + alpha J(f) under the risk-neutral spec.
  const auto m = discounted_two_state(0.9);
  const ValueFunction J(std::vector<double>{2.0, -1.0});
  CHECK(apply_H(m, 0, vertex_mix(2, 1), J, CptSpec::risk_neutral()) ==
        Approx(0.8 * (0.5 + 0.9 * -1.0) + 0.2 * (1.0 + 0.9 * 2.0)).margin(1e-14));
  // A nonzero CptSpec reference point does not move the operator.
  CHECK(apply_H(m, 0, vertex_mix(2, 1), J, CptSpec::risk_neutral(3.0)) ==
        apply_H(m, 0, vertex_mix(2, 1), J, CptSpec::risk_neutral()));

  const auto tr = transient_example();
  const ValueFunction Jt(std::vector<double>{1.0, 3.0, 0.0});
  CHECK(apply_H(tr, 0, vertex_mix(1, 0), Jt, tk_w_plus(0.61)) == Approx(kTransientH).margin(1e-14));
  CHECK(apply_H(tr, 2, vertex_mix(1, 0), Jt, tk_w_plus(0.61)) == 0.0);
}

TEST_CASE("bellman_min examples", "[bellman]") {
  const SolveConfig cfg;
  const auto tr = transient_example();
  const ValueFunction Jt(std::vector<double>{1.0, 3.0, 0.0});
  const auto single = bellman_min(tr, 0, Jt, tk_w_plus(0.61), cfg);
  CHECK(single.mix == std::vector<double>{1.0});
  CHECK(single.value == apply_H(tr, 0, single.mix, Jt, tk_w_plus(0.61)));

  Rng rng(derive_seed(15, 1));
  for (int t = 0; t < 20; ++t) {
    harness::RandomMdp params{4, 4, 3, -1.0, 1.0, Discounted{0.7}};
    const auto model = harness::random_mdp(params, derive_seed(15, 100 + t));
    std::vector<double> jv(4);
    for (double& v : jv) v = rng.uniform(-2.0, 2.0);
    const ValueFunction J(jv);
    for (StateIndex x = 0; x < 4; ++x) {
      const auto best = bellman_min(model, x, J, CptSpec::risk_neutral(), cfg);
      double vertex = 1e300;
      for (std::size_t a = 0; a < 4; ++a) {
        vertex = std::min(vertex, apply_H(model, x, vertex_mix(4, a), J, CptSpec::risk_neutral()));
      }
      REQUIRE(std::count(best.mix.begin(), best.mix.end(), 1.0) == 1);
      REQUIRE(best.value == Approx(vertex).margin(1e-12));
    }
  }
}

TEST_CASE("randomized-optimality witness", "[bellman][witness]") {
  const auto model = harness::crafted_randomized_optimality();
  const auto spec = tk_identity_u();
  const auto J = ValueFunction::zeros(1);
  const double v0 = apply_H(model, 0, vertex_mix(2, 0), J, spec);
  const double v1 = apply_H(model, 0, vertex_mix(2, 1), J, spec);
  CHECK(v0 == Approx(kWitnessVertex0).margin(1e-14));
  CHECK(v1 == Approx(kWitnessVertex1).margin(1e-14));

  const auto best = bellman_min(model, 0, J, spec, SolveConfig{});
  CHECK(best.mix[0] > 0.0);
  CHECK(best.mix[1] > 0.0);
  CHECK(best.mix[1] == Approx(kWitnessMix).margin(1e-4));
  CHECK(std::min(v0, v1) - best.value > kWitnessGridMargin);

  SolveConfig det;
  det.deterministic_only = true;
  CHECK(bellman_min(model, 0, J, spec, det).mix == vertex_mix(2, 1));
}

TEST_CASE("bellman_min tie-breaking prefers the lowest vertex", "[bellman]") {
  std::vector<std::vector<Action>> acts{{{"a", {{1.0, 0, 1.0, "d"}}}, {"b", {{1.0, 0, 1.0, "d"}}},
                                         {"c", {{1.0, 0, 1.0, "d"}}}}};
  const MarkovModel m({"s"}, acts, 1.0, Discounted{0.5});
  const auto best = bellman_min(m, 0, ValueFunction::zeros(1), tk_identity_u(), SolveConfig{});
  CHECK(best.mix == vertex_mix(3, 0));
}

TEST_CASE("solver configuration is validated", "[bellman][errors]") {
  SolveConfig bad;
  bad.tol = 0.0;
  CHECK_THROWS(bad.validate());
  bad = SolveConfig{};
  bad.simplex_resolution = 0;
  CHECK_THROWS(value_iteration(discounted_two_state(0.9), CptSpec::risk_neutral(), bad));
  CHECK_THROWS(value_iteration(discounted_two_state(0.9), CptSpec::risk_neutral(), ValueFunction::zeros(3), {}));
}

TEST_CASE("zero costs give a zero fixed point", "[bellman]") {
  const auto spec = tk_identity_u();
  for (const ModelMode mode : {ModelMode{Discounted{0.9}}, ModelMode{Transient{2}}}) {
    const auto res = value_iteration(zero_cost(mode), spec, SolveConfig{});
    CHECK(res.converged);
    CHECK(res.value.sup_norm() == 0.0);
  }
}

TEST_CASE("residuals decay at about alpha under a conforming spec", "[bellman]") {
  const auto model = discounted_two_state(0.9);
  const auto spec = tk_identity_u();
  REQUIRE(contraction_condition_check(spec, 0.9, 1.0, default_z_family(1.0)).pass);
  SolveConfig cfg;
  cfg.tol = 1e-11;
  const auto res = value_iteration(model, spec, cfg);
  REQUIRE(res.converged);
  for (std::size_t k = 5; k < res.trace.size(); ++k) {
    if (res.trace[k - 1] < 1e-13) break;
    REQUIRE(res.trace[k] / res.trace[k - 1] <= 0.9 + 0.01);
  }
}

TEST_CASE("risk-neutral value iteration matches the classical oracle", "[bellman][property]") {
  SolveConfig cfg;
  cfg.tol = 1e-12;
  for (std::uint64_t s = 0; s < 5; ++s) {
    harness::RandomMdp params{8, 3, 3, -1.0, 1.0, Discounted{0.8}};
    const auto model = harness::random_mdp(params, derive_seed(16, s));
    const auto res = value_iteration(model, CptSpec::risk_neutral(), cfg);
    const auto oracle = harness::expected_cost_value_iteration(model, 1e-14, 100000);
    REQUIRE(res.converged);
    REQUIRE(sup_distance(res.value, oracle.value) <= 1e-9);
    for (StateIndex x = 0; x < model.num_states(); ++x) {
      const double best = *std::min_element(oracle.q[x].begin(), oracle.q[x].end());
      const auto mix = res.policy.at(x);
      for (std::size_t a = 0; a < mix.size(); ++a) {
        if (mix[a] > 0.0) REQUIRE(oracle.q[x][a] <= best + 1e-9);
      }
    }
  }
}

TEST_CASE("transient solves pin the absorbing state and are policy-consistent", "[bellman][property]") {
  Rng rng(derive_seed(17, 0));
  std::size_t solved = 0;
  for (std::uint64_t s = 0; s < 12; ++s) {
    harness::RandomMdp params{5, 2, 3, -1.0, 1.0, Transient{0}};
    const auto model = harness::random_mdp(params, derive_seed(17, s));
    CptSpec spec;
    if (s % 2 == 1) spec.w_plus = testing::random_tabulated(rng);
    if (s % 3 == 1) spec.w_minus = testing::random_tabulated(rng);
    const auto probe = k_step_contraction_probe(model, spec, 50, 50, s);
    if (!probe.k) continue;
    ++solved;
    std::vector<double> j0(model.num_states(), 5.0);
    SolveConfig cfg;
    cfg.tol = 1e-10;
    const auto res = value_iteration(model, spec, ValueFunction(j0), cfg);
    REQUIRE(res.converged);
    REQUIRE(res.value[*model.absorbing_state()] == 0.0);
    const auto again = apply_policy_operator(model, res.policy, res.value, spec);
    REQUIRE(sup_distance(again, res.value) <= cfg.tol + 1e-12);
  }
  CHECK(solved >= 6);
  const auto tr = transient_example();
  const auto res = value_iteration(tr, tk_w_plus(0.61), SolveConfig{});
  CHECK(res.converged);
  CHECK(res.value[2] == 0.0);
}

TEST_CASE("discounted solves are policy-consistent", "[bellman][property]") {
  Rng rng(derive_seed(18, 0));
  std::size_t solved = 0;
  for (std::uint64_t s = 0; s < 12; ++s) {
    harness::RandomMdp params{5, 3, 2, -1.0, 1.0, Discounted{0.7}};
    const auto model = harness::random_mdp(params, derive_seed(18, s));
    const auto spec = testing::random_tame_spec(rng);
    if (!contraction_condition_check(spec, 0.7, model.cost_bound(), default_z_family(model.cost_bound())).pass) continue;
    ++solved;
    SolveConfig cfg;
    cfg.tol = 1e-10;
    const auto res = value_iteration(model, spec, cfg);
    REQUIRE(res.converged);
    const auto again = apply_policy_operator(model, res.policy, res.value, spec);
    REQUIRE(sup_distance(again, res.value) <= cfg.tol + 1e-12);
  }
  CHECK(solved >= 6);
}

TEST_CASE("more absorption shrinks both integrals", "[bellman][property]") {
  Rng rng(derive_seed(19, 0));
  for (int t = 0; t < 200; ++t) {
    const auto spec = testing::random_spec(rng);
    const double p_out = rng.uniform(0.0, 0.5);
    const double extra = rng.uniform(0.0, 0.5 - p_out * 0.5);
    const double c1 = rng.uniform(-1.0, 1.0);
    const double c2 = rng.uniform(-1.0, 1.0);
    auto build = [&](double out) {
      const double rest = 1.0 - out;
      std::vector<std::vector<Action>> acts{
          {{"go", {{out, 2, 0.5, "out"}, {rest * 0.5, 0, c1, "p"}, {rest - rest * 0.5, 1, c2, "q"}}}},
          {{"go", {{1.0, 2, 0.0, "out"}}}},
          {{"stay", {{1.0, 2, 0.0, "stay"}}}}};
      return MarkovModel({"s0", "s1", "A"}, acts, 1.0, Transient{2});
    };
    const ValueFunction J(std::vector<double>{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), 0.0});
    const auto lo = cpt_parts(return_distribution(build(p_out), 0, vertex_mix(1, 0), J), spec.with_reference(0.0));
    const auto hi =
        cpt_parts(return_distribution(build(p_out + extra), 0, vertex_mix(1, 0), J), spec.with_reference(0.0));
    REQUIRE(hi.gains <= lo.gains + 1e-12);
    REQUIRE(hi.losses <= lo.losses + 1e-12);
  }
}

TEST_CASE("monotonicity probe", "[diagnostics]") {
  Rng rng(derive_seed(20, 0));
  harness::RandomMdp params{6, 3, 3, -1.0, 1.0, Discounted{0.9}};
  const auto model = harness::random_mdp(params, 4);
  for (int t = 0; t < 5; ++t) {
    const auto report = monotonicity_probe(model, testing::random_spec(rng), 1000, derive_seed(20, t));
    CHECK(report.trials == 1000);
    CHECK(report.ok());
  }
  const ValueFunction J(std::vector<double>(6, 0.3));
  CHECK(apply_H(model, 0, vertex_mix(3, 1), J, tk_identity_u()) ==
        apply_H(model, 0, vertex_mix(3, 1), ValueFunction(std::vector<double>(6, 0.3)), tk_identity_u()));
}

TEST_CASE("monotonicity probe catches a corrupted weighting", "[diagnostics]") {
  CptSpec bad;
  bad.w_plus = WeightingFunction::tabulated_unchecked({{0.0, 0.0}, {0.3, 0.8}, {0.6, 0.3}, {1.0, 1.0}});
  const auto model = corrupted_fixture_model();
  // By hand: J = (., 1, 2) gives atoms {1: .3, 2: .3}, value 1 w(.6) + 1 w(.3) = 1.1;
  // raising J(s1) to 2 gives {2: .6}, value 2 w(.6) = 0.6.
  const ValueFunction lo(std::vector<double>{0.0, 1.0, 2.0, 0.0});
  const ValueFunction hi(std::vector<double>{0.0, 2.0, 2.0, 0.0});
  CHECK(apply_H(model, 0, vertex_mix(1, 0), lo, bad) == Approx(1.1).margin(1e-14));
  CHECK(apply_H(model, 0, vertex_mix(1, 0), hi, bad) == Approx(0.6).margin(1e-14));
  CHECK_FALSE(monotonicity_probe(model, bad, 1000, 1).ok());
}

TEST_CASE("contraction condition check", "[diagnostics]") {
  const auto family = default_z_family(1.0);
  const auto id = contraction_condition_check(CptSpec::risk_neutral(), 0.9, 1.0, family);
  CHECK(id.pass);
  CHECK(id.beta_hat == Approx(0.9).margin(1e-12));

  const auto steep = contraction_condition_check(tk_w_plus(0.3), 0.99, 1.0, family);
  CHECK_FALSE(steep.pass);
  CHECK(steep.beta_hat == Approx(kBetaTk03).margin(1e-9));

  const auto tk = contraction_condition_check(tk_identity_u(), 0.9, 1.0, family);
  CHECK(tk.pass);
  CHECK(tk.beta_hat == Approx(kBetaTk061).margin(1e-9));

  CptSpec power = CptSpec::risk_neutral();
  power.u_plus = UtilityFunction::power(0.88);
  const auto structural = contraction_condition_check(power, 0.9, 1.0, family);
  REQUIRE(structural.structural_failure.has_value());
  CHECK(structural.structural_failure->rfind("condition 2", 0) == 0);
  CHECK_FALSE(structural.pass);
}

TEST_CASE("empirical contraction modulus", "[diagnostics]") {
  const auto half = discounted_two_state(0.5);
  const auto rn = empirical_contraction_modulus(half, CptSpec::risk_neutral(), 1000, 3);
  CHECK(rn.pairs == 1000);
  CHECK(rn.max_ratio <= 0.5 + 1e-9);
  CHECK(rn.max_ratio >= 0.5 - 1e-9);

  const auto m = discounted_two_state(0.9);
  const auto cc = contraction_condition_check(tk_identity_u(), 0.9, 1.0, default_z_family(1.0));
  REQUIRE(cc.pass);
  CHECK(empirical_contraction_modulus(m, tk_identity_u(), 1000, 4).max_ratio <= cc.beta_hat + 1e-6);
}

TEST_CASE("K-step contraction probe", "[diagnostics]") {
  const auto rn = CptSpec::risk_neutral();
  const auto geo = k_step_contraction_probe(chain_geometric(), rn, 10, 200, 1);
  REQUIRE(geo.k.has_value());
  CHECK(*geo.k == 1);
  CHECK(geo.moduli[0] == Approx(0.5).margin(1e-9));

  const auto line = k_step_contraction_probe(chain_line(), rn, 10, 200, 1);
  REQUIRE(line.k.has_value());
  CHECK(*line.k == 3);
  CHECK(line.transience.bound == 2.0);

  const auto stl = k_step_contraction_probe(chain_stay_then_leave(), rn, 10, 200, 1);
  REQUIRE(stl.k.has_value());
  CHECK(*stl.k == 2);
  CHECK(stl.moduli[1] == Approx(0.75).margin(1e-9));

  const auto tk = k_step_contraction_probe(chain_geometric(), tk_w_plus(0.61), 10, 200, 1);
  REQUIRE(tk.structural_failure.has_value());
  CHECK(tk.structural_failure->find("condition 4") != std::string::npos);
  CHECK_FALSE(tk.k.has_value());

  CHECK_THROWS(k_step_contraction_probe(discounted_two_state(0.9), rn, 10, 10, 1));
}
