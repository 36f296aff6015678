#include "sgdlab/sgdlab.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

namespace {

using namespace sgdlab;

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json j = json::parse(in);
  return j.get<ExperimentConfig>();
}

void apply_overrides(ExperimentConfig& config, const std::optional<uint64_t>& seed,
                     const std::optional<double>& eta, const std::optional<int>& batch,
                     const std::optional<int64_t>& epochs, const std::optional<std::string>& out) {
  if (seed) config.seeds = {*seed};
  if (eta) config.optimizer.eta = *eta;
  if (batch) config.optimizer.batch = *batch;
  if (epochs) {
    config.optimizer.epochs = *epochs;
    config.optimizer.iterations = 0;
  }
  if (out) config.out_dir = *out;
}

int cmd_parse_check(const std::string& file, const std::string& data_dir) {
  Dataset data = load_libsvm_file(resolve_data_path(file, data_dir));
  std::map<double, size_t> histogram;
  for (const auto& ex : data.examples) ++histogram[ex.label];
  std::printf("n = %zu\nd = %d\nlabels:\n", data.n(), data.dimension);
  for (const auto& [label, count] : histogram)
    std::printf("  %+g : %zu\n", label, count);
  return 0;
}

int cmd_quartic(const std::string& scenario, uint64_t seed, const std::string& out_dir) {
  QuarticScenarioReport rep = scenario_quartic(scenario, seed);
  std::printf("quartic scenario (%s), seed %llu\n", rep.scenario.c_str(),
              static_cast<unsigned long long>(rep.seed));
  std::printf("  local smoothness estimate: %s\n", format_double(rep.smoothness_estimate).c_str());
  std::printf("  eta: %s\n", format_double(rep.eta).c_str());
  std::printf("  min over t of dist to {+-w_hat}: %s\n",
              format_double(rep.min_dist_over_t).c_str());
  std::printf("  terminal dist to {+-w_hat}:      %s\n", format_double(rep.terminal_dist).c_str());
  std::printf("  oscillation radius (last 20%%):   %s\n",
              format_double(rep.oscillation_radius).c_str());
  std::printf("  N_hat from r_t:                  %s%s\n", format_double(rep.n_hat).c_str(),
              rep.rt_degenerate ? " (degenerate denominator flagged)" : "");
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream trace_out(std::filesystem::path(out_dir) /
                            ("quartic_" + rep.scenario + "_seed" + std::to_string(seed) + ".csv"));
    rep.trace.to_csv(trace_out);
    json rt_curve = json::array();
    for (const auto& [t, r] : rep.rt_curve) rt_curve.push_back({{"t", t}, {"rt", r}});
    json doc{{"scenario", rep.scenario},
             {"seed", rep.seed},
             {"eta", rep.eta},
             {"smoothness_estimate", rep.smoothness_estimate},
             {"min_dist_over_t", rep.min_dist_over_t},
             {"terminal_dist", rep.terminal_dist},
             {"oscillation_radius", rep.oscillation_radius},
             {"n_hat", rep.n_hat},
             {"rt_degenerate", rep.rt_degenerate},
             {"rt_curve", std::move(rt_curve)}};
    std::ofstream report_out(std::filesystem::path(out_dir) /
                             ("quartic_" + rep.scenario + "_seed" + std::to_string(seed) + ".json"));
    report_out << doc.dump(2) << "\n";
  }
  return 0;
}

int cmd_census(const ExperimentConfig& config, const std::string& data_dir) {
  BuiltProblem built = build_problem(config.problem, data_dir);
  Vector w_ref = reference_point(built);
  GradientCensus census = gradient_census(
      *built.objective, w_ref, config.diagnostics.epsilon_grid, config.diagnostics.census_batch,
      config.diagnostics.census_mode == "monte_carlo" ? CensusMode::monte_carlo
                                                      : CensusMode::exact,
      config.diagnostics.k_draws, derive_seed(config.seeds.front(), 99));
  std::printf("gradient census at the reference point\n%s", census.to_table().c_str());
  if (auto eps = check_epsilon_condition(census))
    std::printf("smallest grid epsilon with 1 - p <= epsilon: %s\n", format_double(*eps).c_str());
  else
    std::printf("no grid epsilon satisfies 1 - p <= epsilon\n");
  return 0;
}

int cmd_bounds(const std::string& trace_path, const std::string& regime,
               const bounds::BoundInputs& in) {
  std::ifstream trace_in(trace_path);
  if (!trace_in) throw std::runtime_error("cannot open trace " + trace_path);
  Trace trace = Trace::from_csv(trace_in);
  std::printf("t,bound\n");
  for (const auto& row : trace.rows) {
    const double t = static_cast<double>(row.t);
    double value = 0.0;
    if (regime == "strongly-convex") value = bounds::strongly_convex(in, t);
    else if (regime == "convex") value = bounds::convex(in, std::max(1.0, t));
    else if (regime == "nonconvex") value = bounds::nonconvex(in, t);
    else throw std::runtime_error("regime must be strongly-convex | convex | nonconvex");
    std::printf("%lld,%s\n", static_cast<long long>(row.t), format_double(value).c_str());
  }
  return 0;
}

int cmd_compare(const ExperimentConfig& config, const std::string& data_dir,
                const std::string& out_path) {
  BuiltProblem built = build_problem(config.problem, data_dir);
  const ComponentObjective& problem = *built.objective;

  LbfgsConfig ref_cfg;
  ref_cfg.tolerance = 1e-12;
  ref_cfg.max_iters = 5000;
  LbfgsResult ref = lbfgs_run(problem, Vector::Zero(problem.dim()), ref_cfg);

  std::vector<CompareEntry> entries;
  OptimizerSpec sgd = config.optimizer;
  sgd.algorithm = "sgd";
  OptimizerSpec svrg = config.optimizer;
  svrg.algorithm = "svrg";
  svrg.eta = config.optimizer.eta / 5.0;
  if (svrg.epochs == 0) svrg.epochs = 10;
  OptimizerSpec lbfgs;
  lbfgs.algorithm = "lbfgs";
  lbfgs.tolerance = 1e-12;
  entries.push_back({"sgd", sgd});
  entries.push_back({"svrg", svrg});
  entries.push_back({"lbfgs", lbfgs});

  CompareResult result = compare_optimizers(problem, Vector::Zero(problem.dim()), entries,
                                            config.seeds.front(), ref.f_value, config.trace_every);
  if (out_path.empty()) {
    std::fputs(result.csv.c_str(), stdout);
  } else {
    std::ofstream out(out_path);
    out << result.csv;
    std::printf("wrote %s\n", out_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-sum SGD lab: optimizers, gradient censuses, and convergence-bound checks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string data_dir;
  app.add_option("--data-dir", data_dir, "directory searched for dataset files");

  std::optional<uint64_t> seed_override;
  std::optional<double> eta_override;
  std::optional<int> batch_override;
  std::optional<int64_t> epochs_override;
  std::optional<std::string> out_override;
  app.add_option("--seed", seed_override, "replace the config seed list with one seed");
  app.add_option("--eta", eta_override, "override the optimizer step size");
  app.add_option("--batch", batch_override, "override the SGD batch size");
  app.add_option("--epochs", epochs_override, "override the epoch budget");
  app.add_option("--out", out_override, "override the output directory");

  auto* run = app.add_subcommand("run", "run a full experiment from a JSON config");
  std::string run_config;
  run->add_option("config", run_config, "experiment config (JSON)")->required();

  auto* census = app.add_subcommand("census", "gradient census at the reference point");
  std::string census_config;
  census->add_option("config", census_config, "experiment config (JSON)")->required();

  auto* bounds_cmd = app.add_subcommand("bounds", "print bound curves aligned to a trace");
  std::string trace_path, regime = "strongly-convex";
  sgdlab::bounds::BoundInputs bound_in;
  double m_eps_flag = -1.0;
  bounds_cmd->add_option("trace", trace_path, "trace CSV produced by run")->required();
  bounds_cmd->add_option("--regime", regime, "strongly-convex | convex | nonconvex");
  bounds_cmd->add_option("--mu", bound_in.mu, "strong convexity constant");
  bounds_cmd->add_option("--L", bound_in.L, "smoothness constant")->required();
  bounds_cmd->add_option("--eta", bound_in.eta, "step size")->required();
  bounds_cmd->add_option("--epsilon", bound_in.epsilon, "census threshold")->required();
  bounds_cmd->add_option("--p", bound_in.p_eps, "census p_epsilon");
  bounds_cmd->add_option("--M", m_eps_flag, "census M_epsilon (omit when p = 1)");
  bounds_cmd->add_option("--dist0", bound_in.dist0_sq, "|w0 - w*|^2");
  bounds_cmd->add_option("--f0-gap", bound_in.f0_gap, "F(w0) - F*");
  bounds_cmd->add_option("--N", bound_in.n_constant, "drift constant N");

  auto* compare = app.add_subcommand(
      "compare", "SGD vs SVRG (eta/5, default m) vs L-BFGS on one problem, aligned by evals");
  std::string compare_config, compare_out;
  compare->add_option("config", compare_config, "experiment config (JSON)")->required();
  compare->add_option("--csv-out", compare_out, "write the aligned CSV here instead of stdout");

  auto* quartic = app.add_subcommand("quartic", "signal-recovery scenario (i) or (ii)");
  std::string quartic_case;
  uint64_t quartic_seed = 1;
  std::string quartic_out;
  quartic->add_option("--case", quartic_case, "i | ii")->required();
  quartic->add_option("--run-seed", quartic_seed, "SGD sampling seed");
  quartic->add_option("--out", quartic_out, "directory for trace + report files");

  auto* parse_check = app.add_subcommand("parse-check", "parse a LIBSVM file and summarize it");
  std::string parse_file;
  parse_check->add_option("file", parse_file, "LIBSVM file (.gz accepted)")->required();

  auto* schema = app.add_subcommand("config-schema", "print the config schema with all defaults");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentConfig config = load_config(run_config);
      apply_overrides(config, seed_override, eta_override, batch_override, epochs_override,
                      out_override);
      RunReport report = run_experiment(config, data_dir);
      std::printf("config hash: %s\n", report.hash.c_str());
      std::printf("wrote %s/report.json (wall clock %.2fs)\n", config.out_dir.c_str(),
                  report.wall_clock_sec);
      return 0;
    }
    if (*census) {
      ExperimentConfig config = load_config(census_config);
      apply_overrides(config, seed_override, eta_override, batch_override, epochs_override,
                      out_override);
      return cmd_census(config, data_dir);
    }
    if (*bounds_cmd) {
      if (m_eps_flag >= 0) bound_in.m_eps = m_eps_flag;
      return cmd_bounds(trace_path, regime, bound_in);
    }
    if (*compare) {
      ExperimentConfig config = load_config(compare_config);
      apply_overrides(config, seed_override, eta_override, batch_override, epochs_override,
                      out_override);
      return cmd_compare(config, data_dir, compare_out);
    }
    if (*quartic) {
      return cmd_quartic(quartic_case, seed_override.value_or(quartic_seed), quartic_out);
    }
    if (*parse_check) {
      return cmd_parse_check(parse_file, data_dir);
    }
    if (*schema) {
      std::printf("%s\n", sgdlab::config_schema().dump(2).c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
