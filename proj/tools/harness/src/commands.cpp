#include "cptdp/harness/commands.hpp"

#include "cptdp/cpt_value.hpp"
#include "cptdp/diagnostics.hpp"
#include "cptdp/estimator.hpp"
#include "cptdp/format.hpp"
#include "cptdp/harness/generators.hpp"
#include "cptdp/harness/oracles.hpp"
#include "cptdp/random.hpp"
#include "cptdp/serialization.hpp"
#include "cptdp/transience.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace cptdp::harness {

namespace fs = std::filesystem;
using cptdp::format_double;

namespace {

constexpr const char* kToolVersion = "cptdp 0.1.0";

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError("io", "cannot create output directory '" + dir.string() + "': " + ec.message());
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw CliError("io", "cannot open '" + (dir / name).string() + "' for writing");
  return out;
}

ReportHeader base_header(const RunConfig& cfg, const std::string& command) {
  ReportHeader h{{"tool", kToolVersion}, {"command", command}, {"master_seed", std::to_string(cfg.seed)},
                 {"seed_scheme", seed_scheme()}};
  if (cfg.model_path) h.emplace_back("model", cfg.model_path->string());
  if (cfg.spec_path) h.emplace_back("spec", cfg.spec_path->string());
  if (cfg.dist_path) h.emplace_back("distribution", cfg.dist_path->string());
  if (cfg.generator_path) h.emplace_back("generator", cfg.generator_path->string());
  return h;
}

void add_solver_header(ReportHeader& h, const SolveConfig& s) {
  h.emplace_back("tol", format_double(s.tol));
  h.emplace_back("max_iter", std::to_string(s.max_iter));
  h.emplace_back("simplex_resolution", std::to_string(s.simplex_resolution));
  h.emplace_back("refine_steps", std::to_string(s.refine_steps));
  h.emplace_back("deterministic_only", s.deterministic_only ? "true" : "false");
}

void write_header_json(const fs::path& dir, const ReportHeader& header) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : header) j[k] = v;
  auto out = open_output(dir, "run.json");
  out << j.dump(2) << '\n';
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("io", "cannot read '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// One row of the check table.
struct CheckRow {
  std::string name;
  std::string status;  // PASS, FAIL, SKIP or INFO
  std::string detail;
};

void print_table(std::ostream& out, const std::vector<CheckRow>& rows) {
  out << std::left << std::setw(24) << "check" << std::setw(8) << "status" << "detail\n";
  for (const auto& r : rows) out << std::left << std::setw(24) << r.name << std::setw(8) << r.status << r.detail << '\n';
}

struct BenchRow {
  std::size_t iterations = 0;
  bool converged = false;
  double final_residual = 0.0;
  double max_ratio = 0.0;
  double tail_ratio = 0.0;
  double randomization_gain = 0.0;
  std::optional<double> oracle_gap;
  std::size_t states = 0;
  double wall_seconds = 0.0;
};

BenchRow bench_one(const MarkovModel& model, const CptSpec& spec, const SolveConfig& solve) {
  BenchRow row;
  const auto start = std::chrono::steady_clock::now();
  const SolveResult res = value_iteration(model, spec, solve);
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  row.states = model.num_states();
  row.iterations = res.iterations;
  row.converged = res.converged;
  row.final_residual = res.trace.empty() ? 0.0 : res.trace.back();
  for (std::size_t k = 1; k < res.trace.size(); ++k) {
    if (res.trace[k - 1] > 0.0) row.max_ratio = std::max(row.max_ratio, res.trace[k] / res.trace[k - 1]);
  }
  const std::size_t t = res.trace.size();
  if (t >= 2 && res.trace[t - 2] > 0.0) row.tail_ratio = res.trace[t - 1] / res.trace[t - 2];

  // How much the best mix improves on the best single action at the solution.
  for (StateIndex x = 0; x < model.num_states(); ++x) {
    if (model.is_absorbing(x)) continue;
    const double mixed = bellman_min(model, x, res.value, spec, solve).value;
    double vertex = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < model.num_actions(x); ++a) {
      vertex = std::min(vertex, apply_H(model, x, vertex_mix(model.num_actions(x), a), res.value, spec));
    }
    row.randomization_gain = std::max(row.randomization_gain, vertex - mixed);
  }

  if (spec.is_risk_neutral()) {
    const auto oracle = expected_cost_value_iteration(model, solve.tol * 1e-3, solve.max_iter * 10);
    row.oracle_gap = sup_distance(oracle.value, res.value);
  }
  return row;
}

}  // namespace

std::string seed_scheme() {
  return "stream k of master m uses seed splitmix64(m + (k + 1) * 0x9E3779B97F4A7C15); "
         "bench instance i: stream i; estimate (n index j, repeat r): stream r of stream j; "
         "check: monotonicity stream 0, modulus stream 1, k-step stream 2";
}

void RunConfig::require_inputs(std::initializer_list<const char*> required) const {
  auto check = [](const char* flag, const std::optional<fs::path>& p, bool needed) {
    if (!p) {
      if (needed) throw CliError("io", std::string(flag) + " is required");
      return;
    }
    std::error_code ec;
    if (!fs::is_regular_file(*p, ec)) {
      throw CliError("io", std::string(flag) + ": file '" + p->string() + "' does not exist");
    }
  };
  auto needed = [&](const char* flag) {
    return std::find_if(required.begin(), required.end(),
                        [&](const char* r) { return std::string(r) == flag; }) != required.end();
  };
  check("--model", model_path, needed("--model"));
  check("--spec", spec_path, needed("--spec"));
  check("--dist", dist_path, needed("--dist"));
  check("--generator", generator_path, needed("--generator"));
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  cfg.require_inputs({"--spec", "--dist"});
  const CptSpec spec = load_spec(*cfg.spec_path);
  const DiscreteDistribution dist = load_distribution(*cfg.dist_path);
  out << format_double(cpt_value_exact(dist, spec)) << '\n';
  return 0;
}

int cmd_estimate(const RunConfig& cfg, std::ostream& out) {
  cfg.require_inputs({"--spec", "--dist"});
  const CptSpec spec = load_spec(*cfg.spec_path);
  const DiscreteSampler sampler(load_distribution(*cfg.dist_path), cfg.dist_path->filename().string());
  ConvergenceStudy study;
  try {
    study = convergence_study(sampler, spec, cfg.ns, cfg.repeats, cfg.seed);
  } catch (const std::invalid_argument& e) {
    throw CliError("usage", e.what());
  }

  std::ostringstream summary;
  summary << "n,mean_abs_error,std_abs_error,median_abs_error\n";
  for (const auto& s : study.summary) {
    summary << s.n << ',' << format_double(s.mean_abs_error) << ',' << format_double(s.std_abs_error) << ','
            << format_double(s.median_abs_error) << '\n';
  }

  if (cfg.out_dir) {
    ReportHeader h = base_header(cfg, "estimate");
    h.emplace_back("repeats", std::to_string(cfg.repeats));
    h.emplace_back("ground_truth", format_double(study.ground_truth));
    write_header_json(*cfg.out_dir, h);
    auto rows = open_output(*cfg.out_dir, "estimates.csv");
    write_convergence_csv(rows, study);
    open_output(*cfg.out_dir, "summary.csv") << summary.str();
  }
  out << "ground_truth," << format_double(study.ground_truth) << '\n' << summary.str();
  return 0;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  cfg.require_inputs({"--model", "--spec"});
  const CptSpec spec = load_spec(*cfg.spec_path);
  const MarkovModel model = load_model(*cfg.model_path, {cfg.allow_invalid});
  try {
    cfg.solve.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError("usage", e.what());
  }
  const SolveResult res = value_iteration(model, spec, cfg.solve);

  if (cfg.out_dir) {
    ReportHeader h = base_header(cfg, "solve");
    add_solver_header(h, cfg.solve);
    auto report = open_output(*cfg.out_dir, "report.json");
    write_solve_report(report, model, res, h);
    auto csv = open_output(*cfg.out_dir, "residuals.csv");
    write_residual_csv(csv, res);
  }

  const double residual = res.trace.empty() ? 0.0 : res.trace.back();
  out << "iterations," << res.iterations << '\n'
      << "final_residual," << format_double(residual) << '\n'
      << "state,value\n";
  for (StateIndex x = 0; x < model.num_states(); ++x) {
    out << model.state_name(x) << ',' << format_double(res.value[x]) << '\n';
  }
  if (!res.converged) {
    throw CliError("convergence", "value iteration stopped after " + std::to_string(res.iterations) +
                                      " sweeps with residual " + format_double(residual));
  }
  return 0;
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  cfg.require_inputs({"--model", "--spec"});
  const CptSpec spec = load_spec(*cfg.spec_path);
  const MarkovModel model = load_model(*cfg.model_path, {true});

  std::vector<CheckRow> rows;
  const ValidationReport validation = validate_model(model);
  rows.push_back({"validate_model", validation.ok() ? "PASS" : "FAIL", validation.summary()});
  if (!validation.ok()) {
    for (const auto& v : validation.violations) rows.push_back({"  violation", "FAIL", v.message});
    rows.push_back({"remaining checks", "SKIP", "model is invalid"});
    print_table(out, rows);
    return 0;
  }

  const MonotonicityReport mono = monotonicity_probe(model, spec, cfg.trials, derive_seed(cfg.seed, 0));
  {
    std::ostringstream d;
    d << mono.violations.size() << "/" << mono.trials << " violations";
    if (!mono.ok()) {
      const auto& v = mono.violations.front();
      d << "; first at state '" << model.state_name(v.state) << "': H(J) = " << format_double(v.h_lower)
        << " > H(J') = " << format_double(v.h_upper);
    }
    rows.push_back({"monotonicity", mono.ok() ? "PASS" : "FAIL", d.str()});
  }

  if (const auto* disc = std::get_if<Discounted>(&model.mode())) {
    const double c = model.cost_bound();
    const ContractionCheck cc = contraction_condition_check(spec, disc->alpha, c, default_z_family(c));
    const ModulusEstimate mod = empirical_contraction_modulus(model, spec, cfg.trials, derive_seed(cfg.seed, 1));
    if (cc.structural_failure) {
      rows.push_back({"contraction_condition", "FAIL", *cc.structural_failure});
      rows.push_back({"empirical_modulus", "INFO", "max ratio " + format_double(mod.max_ratio)});
    } else {
      std::ostringstream d;
      d << "beta_hat = " << format_double(cc.beta_hat);
      if (!cc.pass) d << " >= 1 (condition 4 fails at family member " << cc.worst_index << ", c' = "
                      << format_double(cc.worst_level) << ")";
      rows.push_back({"contraction_condition", cc.pass ? "PASS" : "FAIL", d.str()});
      const bool within = mod.max_ratio <= cc.beta_hat + 1e-6;
      rows.push_back({"empirical_modulus", cc.pass ? (within ? "PASS" : "FAIL") : "INFO",
                      "max ratio " + format_double(mod.max_ratio) + " over " + std::to_string(mod.pairs) +
                          " pairs"});
    }
  } else {
    const PliskaReport ut = uniform_transience_check(model, cfg.horizon, 1e-12);
    rows.push_back({"uniform_transience", ut.converged ? "PASS" : "FAIL",
                    ut.converged ? "bound = " + format_double(ut.bound)
                                 : "not certified: partial sum " + format_double(ut.bound) + " after " +
                                       std::to_string(ut.terms) + " terms still growing"});
    const KStepProbe probe = k_step_contraction_probe(model, spec, cfg.k_max, cfg.trials, derive_seed(cfg.seed, 2));
    if (probe.structural_failure) {
      rows.push_back({"k_step_contraction", "FAIL", *probe.structural_failure});
    } else if (probe.k) {
      rows.push_back({"k_step_contraction", "PASS",
                      "K = " + std::to_string(*probe.k) + ", modulus " + format_double(probe.moduli[*probe.k - 1])});
    } else {
      rows.push_back({"k_step_contraction", "FAIL",
                      "no K <= " + std::to_string(cfg.k_max) + " with observed modulus < 1"});
    }
  }
  print_table(out, rows);
  return 0;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
  cfg.require_inputs({"--generator"});
  const CorpusConfig corpus = parse_corpus_config(read_text(*cfg.generator_path));
  CptSpec spec;
  if (cfg.spec_path) {
    spec = load_spec(*cfg.spec_path);
  } else if (std::holds_alternative<CraftedRandomizedOptimality>(corpus.generator)) {
    spec = crafted_spec();
  } else {
    spec = CptSpec::risk_neutral();
  }
  try {
    cfg.solve.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError("usage", e.what());
  }

  std::vector<BenchRow> rows(corpus.count);
  std::vector<std::uint64_t> seeds(corpus.count);
  for (std::size_t i = 0; i < corpus.count; ++i) seeds[i] = derive_seed(cfg.seed, i);

  // Workers pull instance indices; results land in their own slot, so the
  // output order never depends on scheduling.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < corpus.count; i = next++) {
      try {
        rows[i] = bench_one(generate(corpus.generator, seeds[i]), spec, cfg.solve);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::size_t workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, corpus.count);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  std::ostringstream csv;
  csv << "instance,kind,seed,states,iterations,converged,final_residual,max_ratio,tail_ratio,"
         "randomization_gain,oracle_gap\n";
  const std::string kind = kind_name(corpus.generator);
  std::size_t converged = 0;
  double worst_gap = 0.0;
  for (std::size_t i = 0; i < corpus.count; ++i) {
    const BenchRow& r = rows[i];
    converged += r.converged ? 1 : 0;
    if (r.oracle_gap) worst_gap = std::max(worst_gap, *r.oracle_gap);
    csv << i << ',' << kind << ',' << seeds[i] << ',' << r.states << ',' << r.iterations << ','
        << (r.converged ? 1 : 0) << ',' << format_double(r.final_residual) << ',' << format_double(r.max_ratio)
        << ',' << format_double(r.tail_ratio) << ',' << format_double(r.randomization_gain) << ','
        << (r.oracle_gap ? format_double(*r.oracle_gap) : std::string()) << '\n';
  }

  if (cfg.out_dir) {
    ReportHeader h = base_header(cfg, "bench");
    add_solver_header(h, cfg.solve);
    h.emplace_back("instances", std::to_string(corpus.count));
    write_header_json(*cfg.out_dir, h);
    open_output(*cfg.out_dir, "corpus.csv") << csv.str();
    // Wall time varies between runs, so it is kept out of corpus.csv.
    auto timing = open_output(*cfg.out_dir, "timing.csv");
    timing << "instance,wall_seconds\n";
    for (std::size_t i = 0; i < corpus.count; ++i) timing << i << ',' << rows[i].wall_seconds << '\n';
  }
  out << csv.str();
  out << "# " << converged << "/" << corpus.count << " converged";
  if (spec.is_risk_neutral()) out << "; max oracle gap " << format_double(worst_gap);
  out << '\n';
  return 0;
}

}  // namespace cptdp::harness
