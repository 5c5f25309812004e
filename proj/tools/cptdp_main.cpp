#include "cptdp/cpt_value.hpp"
#include "cptdp/harness/commands.hpp"
#include "cptdp/serialization.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

int fail(const std::string& kind, const std::string& message) {
  std::string line = message;
  for (char& ch : line) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  std::cerr << "error[" << kind << "]: " << line << '\n';
  return kind == "usage" ? 64 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cptdp::harness;

  CLI::App app{"CPT-based Markov decision process toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;

  std::string model, spec, dist, generator, out_dir;
  auto paths = [&](CLI::App* sub, bool with_model, bool with_dist, bool with_generator) {
    sub->add_option("--spec", spec, "CPT spec (JSON)");
    if (with_model) sub->add_option("--model", model, "Model (JSON)");
    if (with_dist) sub->add_option("--dist", dist, "Discrete distribution (JSON)");
    if (with_generator) sub->add_option("--generator", generator, "Corpus generator config (JSON)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", cfg.seed, "Master seed");
  };
  auto solver = [&](CLI::App* sub) {
    sub->add_option("--tol", cfg.solve.tol, "Stop when the sup-norm residual is at most this");
    sub->add_option("--max-iter", cfg.solve.max_iter, "Maximum number of sweeps");
    sub->add_option("--simplex-res", cfg.solve.simplex_resolution, "Grid resolution over action mixes");
    sub->add_option("--refine-steps", cfg.solve.refine_steps, "Refinement passes after the grid search");
    sub->add_flag("--deterministic-only", cfg.solve.deterministic_only, "Restrict to deterministic actions");
  };

  auto* evaluate = app.add_subcommand("evaluate", "CPT value of a discrete distribution");
  paths(evaluate, false, true, false);

  auto* estimate = app.add_subcommand("estimate", "Error curve of the order-statistics estimator");
  paths(estimate, false, true, false);
  estimate->add_option("--ns", cfg.ns, "Sample sizes, strictly ascending")->delimiter(',');
  estimate->add_option("--repeats", cfg.repeats, "Seeds per sample size");

  auto* solve = app.add_subcommand("solve", "Value iteration with the CPT Bellman operator");
  paths(solve, true, false, false);
  solver(solve);
  solve->add_flag("--allow-invalid", cfg.allow_invalid, "Solve a model that fails validation");

  auto* check = app.add_subcommand("check", "Monotonicity, contraction and transience checks");
  paths(check, true, false, false);
  check->add_option("--trials", cfg.trials, "Random trials per probe");
  check->add_option("--k-max", cfg.k_max, "Largest K tried by the K-step probe");
  check->add_option("--horizon", cfg.horizon, "Horizon of the transience certificate");

  auto* bench = app.add_subcommand("bench", "Solve a generated corpus and tabulate the runs");
  paths(bench, false, false, true);
  solver(bench);
  bench->add_option("--threads", cfg.threads, "Worker threads (0 = hardware count)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  if (!model.empty()) cfg.model_path = model;
  if (!spec.empty()) cfg.spec_path = spec;
  if (!dist.empty()) cfg.dist_path = dist;
  if (!generator.empty()) cfg.generator_path = generator;
  if (!out_dir.empty()) cfg.out_dir = out_dir;

  try {
    if (*evaluate) return cmd_evaluate(cfg, std::cout);
    if (*estimate) return cmd_estimate(cfg, std::cout);
    if (*solve) return cmd_solve(cfg, std::cout);
    if (*check) return cmd_check(cfg, std::cout);
    return cmd_bench(cfg, std::cout);
  } catch (const CliError& e) {
    return fail(e.kind(), e.what());
  } catch (const cptdp::FormatError& e) {
    return fail("format", e.what());
  } catch (const cptdp::ConvergenceError& e) {
    return fail("convergence", e.what());
  } catch (const std::invalid_argument& e) {
    return fail("invalid", e.what());
  } catch (const std::exception& e) {
    return fail("runtime", e.what());
  }
}
