#include "cptdp/bellman.hpp"
#include "cptdp/cpt_value.hpp"
#include "cptdp/diagnostics.hpp"
#include "cptdp/estimator.hpp"
#include "cptdp/harness/generators.hpp"
#include "cptdp/random.hpp"

#include <benchmark/benchmark.h>

using namespace cptdp;

namespace {

CptSpec tk_power() {
  CptSpec s;
  s.u_plus = UtilityFunction::power(0.88);
  s.u_minus = UtilityFunction::scaled(UtilityFunction::power(0.88), 2.25);
  s.w_plus = WeightingFunction::tversky_kahneman(0.61);
  s.w_minus = WeightingFunction::tversky_kahneman(0.69);
  return s;
}

DiscreteDistribution uniform_law(std::size_t k) {
  Rng rng(derive_seed(0, k));
  std::vector<Atom> atoms;
  double head = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double m = i + 1 == k ? 1.0 - head : 1.0 / static_cast<double>(k);
    head += m;
    atoms.push_back({rng.uniform(-5.0, 5.0), m});
  }
  return DiscreteDistribution::proper(std::move(atoms));
}

void BM_CptValueExact(benchmark::State& state) {
  const auto law = uniform_law(static_cast<std::size_t>(state.range(0)));
  const auto spec = tk_power();
  for (auto _ : state) benchmark::DoNotOptimize(cpt_value_exact(law, spec));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CptValueExact)->RangeMultiplier(10)->Range(10, 100000)->Complexity();

void BM_CptValueQuadrature(benchmark::State& state) {
  const auto law = uniform_law(static_cast<std::size_t>(state.range(0)));
  const auto spec = tk_power();
  for (auto _ : state) benchmark::DoNotOptimize(cpt_value_quadrature(law, spec, 1e-10));
}
BENCHMARK(BM_CptValueQuadrature)->Arg(10)->Arg(100);

void BM_EstimateCpt(benchmark::State& state) {
  const DiscreteSampler sampler(uniform_law(20));
  const auto batch = sampler.draw(static_cast<std::size_t>(state.range(0)), 1);
  const auto spec = tk_power();
  for (auto _ : state) benchmark::DoNotOptimize(estimate_cpt(batch, spec));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EstimateCpt)->RangeMultiplier(10)->Range(100, 1000000)->Complexity(benchmark::oNLogN);

void BM_BellmanSweep(benchmark::State& state) {
  const auto model = harness::random_mdp(harness::RandomMdp{20, 4, 3, -1.0, 1.0, Discounted{0.9}}, 3);
  const auto spec = harness::crafted_spec();
  SolveConfig cfg;
  cfg.simplex_resolution = static_cast<std::size_t>(state.range(0));
  const auto J = ValueFunction::zeros(model.num_states());
  for (auto _ : state) benchmark::DoNotOptimize(apply_bellman_operator(model, J, spec, cfg, nullptr));
}
BENCHMARK(BM_BellmanSweep)->Arg(1)->Arg(4)->Arg(8)->Arg(16);

void BM_ContractionConditionCheck(benchmark::State& state) {
  const auto family = default_z_family(1.0);
  const auto spec = harness::crafted_spec();
  for (auto _ : state) benchmark::DoNotOptimize(contraction_condition_check(spec, 0.9, 1.0, family));
}
BENCHMARK(BM_ContractionConditionCheck)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
