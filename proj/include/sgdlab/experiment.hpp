#pragma once

#include "sgdlab/bounds.hpp"
#include "sgdlab/census.hpp"
#include "sgdlab/gd.hpp"
#include "sgdlab/lbfgs.hpp"
#include "sgdlab/libsvm.hpp"
#include "sgdlab/logistic.hpp"
#include "sgdlab/quartic.hpp"
#include "sgdlab/rt.hpp"
#include "sgdlab/sgd.hpp"
#include "sgdlab/svrg.hpp"
#include "sgdlab/synthetic.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace sgdlab {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct ProblemSpec {
  std::string type = "synthetic_logistic";  // libsvm | synthetic_logistic | quartic

  // libsvm
  std::string path;
  int32_t dimension_override = 0;  // 0 = none
  bool max_abs_scale = false;
  /// Raw-label -> {-1,+1} mapping for files whose labels are neither {-1,+1}
  /// nor {0,1}; JSON keys are the raw labels as strings (e.g. {"1": 1, "2": -1}).
  std::map<std::string, double> label_map;

  // logistic (libsvm + synthetic)
  double lambda = -1.0;  // < 0 -> 1/n

  // synthetic_logistic
  size_t n = 500;
  int d = 20;
  double margin = 5.0;
  double noise_std = 0.2;
  double flip_fraction = 0.0;
  uint64_t gen_seed = 1;

  // quartic
  std::vector<double> w_hat = {1.0, 0.5};
  NoisePlan noise_plan = NoisePlan::scenario_i();
};

struct OptimizerSpec {
  std::string algorithm = "sgd";  // sgd | svrg | gd | lbfgs
  double eta = 0.1;
  int batch = 1;
  int64_t epochs = 0;      // one epoch = n component-gradient evaluations
  int64_t iterations = 0;  // direct override; takes precedence over epochs
  std::string sampling = "with_replacement";
  int64_t inner_steps = 0;  // svrg m; 0 -> 2n
  std::string continuation = "last_iterate";
  int memory = 10;          // lbfgs
  double tolerance = 1e-12;
  int64_t max_iters = 1000;
};

struct DiagnosticsSpec {
  std::vector<double> epsilon_grid = default_epsilon_grid();
  std::string census_mode = "exact";  // exact | monte_carlo
  int census_batch = 1;
  uint64_t k_draws = 10000;
  bool accumulate_rt = false;
};

struct ExperimentConfig {
  ProblemSpec problem;
  OptimizerSpec optimizer;
  DiagnosticsSpec diagnostics;
  std::vector<uint64_t> seeds = {1};
  std::string out_dir = "out";
  int64_t trace_every = 0;  // 0 -> ~50 rows per run
  std::string w0 = "zero";  // zero | random
};

inline void to_json(json& j, const NoisePlan& p) {
  j = json{{"head_count", p.head_count}, {"head_ratio", p.head_ratio}, {"tail_ratio", p.tail_ratio}};
}
inline void from_json(const json& j, NoisePlan& p) {
  p.head_count = j.value("head_count", size_t{0});
  p.head_ratio = j.value("head_ratio", 0.0);
  p.tail_ratio = j.value("tail_ratio", 0.0);
}

inline void to_json(json& j, const ProblemSpec& p) {
  j = json{{"type", p.type},
           {"path", p.path},
           {"dimension_override", p.dimension_override},
           {"max_abs_scale", p.max_abs_scale},
           {"label_map", p.label_map},
           {"lambda", p.lambda},
           {"n", p.n},
           {"d", p.d},
           {"margin", p.margin},
           {"noise_std", p.noise_std},
           {"flip_fraction", p.flip_fraction},
           {"gen_seed", p.gen_seed},
           {"w_hat", p.w_hat},
           {"noise_plan", p.noise_plan}};
}
inline void from_json(const json& j, ProblemSpec& p) {
  ProblemSpec defaults;
  p.type = j.value("type", defaults.type);
  p.path = j.value("path", defaults.path);
  p.dimension_override = j.value("dimension_override", defaults.dimension_override);
  p.max_abs_scale = j.value("max_abs_scale", defaults.max_abs_scale);
  p.label_map = j.value("label_map", defaults.label_map);
  p.lambda = j.value("lambda", defaults.lambda);
  p.n = j.value("n", defaults.n);
  p.d = j.value("d", defaults.d);
  p.margin = j.value("margin", defaults.margin);
  p.noise_std = j.value("noise_std", defaults.noise_std);
  p.flip_fraction = j.value("flip_fraction", defaults.flip_fraction);
  p.gen_seed = j.value("gen_seed", defaults.gen_seed);
  p.w_hat = j.value("w_hat", defaults.w_hat);
  if (j.contains("noise_plan")) p.noise_plan = j.at("noise_plan").get<NoisePlan>();
}

inline void to_json(json& j, const OptimizerSpec& o) {
  j = json{{"algorithm", o.algorithm}, {"eta", o.eta},
           {"batch", o.batch},         {"epochs", o.epochs},
           {"iterations", o.iterations}, {"sampling", o.sampling},
           {"inner_steps", o.inner_steps}, {"continuation", o.continuation},
           {"memory", o.memory},       {"tolerance", o.tolerance},
           {"max_iters", o.max_iters}};
}
inline void from_json(const json& j, OptimizerSpec& o) {
  OptimizerSpec defaults;
  o.algorithm = j.value("algorithm", defaults.algorithm);
  o.eta = j.value("eta", defaults.eta);
  o.batch = j.value("batch", defaults.batch);
  o.epochs = j.value("epochs", defaults.epochs);
  o.iterations = j.value("iterations", defaults.iterations);
  o.sampling = j.value("sampling", defaults.sampling);
  o.inner_steps = j.value("inner_steps", defaults.inner_steps);
  o.continuation = j.value("continuation", defaults.continuation);
  o.memory = j.value("memory", defaults.memory);
  o.tolerance = j.value("tolerance", defaults.tolerance);
  o.max_iters = j.value("max_iters", defaults.max_iters);
}

inline void to_json(json& j, const DiagnosticsSpec& d) {
  j = json{{"epsilon_grid", d.epsilon_grid},
           {"census_mode", d.census_mode},
           {"census_batch", d.census_batch},
           {"k_draws", d.k_draws},
           {"accumulate_rt", d.accumulate_rt}};
}
inline void from_json(const json& j, DiagnosticsSpec& d) {
  DiagnosticsSpec defaults;
  d.epsilon_grid = j.value("epsilon_grid", defaults.epsilon_grid);
  d.census_mode = j.value("census_mode", defaults.census_mode);
  d.census_batch = j.value("census_batch", defaults.census_batch);
  d.k_draws = j.value("k_draws", defaults.k_draws);
  d.accumulate_rt = j.value("accumulate_rt", defaults.accumulate_rt);
}

inline void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"problem", c.problem},     {"optimizer", c.optimizer},
           {"diagnostics", c.diagnostics}, {"seeds", c.seeds},
           {"out_dir", c.out_dir},     {"trace_every", c.trace_every},
           {"w0", c.w0}};
}
inline void from_json(const json& j, ExperimentConfig& c) {
  ExperimentConfig defaults;
  if (j.contains("problem")) c.problem = j.at("problem").get<ProblemSpec>();
  if (j.contains("optimizer")) c.optimizer = j.at("optimizer").get<OptimizerSpec>();
  if (j.contains("diagnostics")) c.diagnostics = j.at("diagnostics").get<DiagnosticsSpec>();
  c.seeds = j.value("seeds", defaults.seeds);
  c.out_dir = j.value("out_dir", defaults.out_dir);
  c.trace_every = j.value("trace_every", defaults.trace_every);
  c.w0 = j.value("w0", defaults.w0);
}

/// Hash of the canonicalized (key-sorted, full-precision) config document.
inline std::string config_hash(const ExperimentConfig& config) {
  const json j = config;
  return hash_hex(hash_bytes(j.dump()));
}

/// Resolve a dataset path: as given if it exists, then relative to
/// `data_dir`, then relative to $SGD_LAB_DATA.
inline std::string resolve_data_path(const std::string& path, const std::string& data_dir = "") {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  if (!data_dir.empty() && fs::exists(fs::path(data_dir) / path))
    return (fs::path(data_dir) / path).string();
  if (const char* env = std::getenv("SGD_LAB_DATA")) {
    if (fs::exists(fs::path(env) / path)) return (fs::path(env) / path).string();
  }
  return path;  // let the open fail with the original name
}

// ---------------------------------------------------------------------------
// Problem construction
// ---------------------------------------------------------------------------

struct BuiltProblem {
  std::shared_ptr<const ComponentObjective> objective;
  std::shared_ptr<const QuarticInstance> quartic;  // set for quartic problems
  bool strongly_convex = false;
};

inline BuiltProblem build_problem(const ProblemSpec& spec, const std::string& data_dir = "") {
  BuiltProblem built;
  if (spec.type == "libsvm") {
    ParseOptions opts;
    if (spec.dimension_override > 0) opts.dimension_override = spec.dimension_override;
    opts.max_abs_scale = spec.max_abs_scale;
    if (!spec.label_map.empty()) {
      std::map<double, double> map;
      for (const auto& [raw, target] : spec.label_map) map[std::stod(raw)] = target;
      opts.label_map = std::move(map);
    }
    Dataset data = load_libsvm_file(resolve_data_path(spec.path, data_dir), opts);
    built.objective = std::make_shared<LogisticProblem>(std::move(data), spec.lambda);
    built.strongly_convex = true;
  } else if (spec.type == "synthetic_logistic") {
    LogisticSyntheticParams p;
    p.n = spec.n;
    p.d = spec.d;
    p.margin = spec.margin;
    p.noise_std = spec.noise_std;
    p.flip_fraction = spec.flip_fraction;
    p.seed = spec.gen_seed;
    built.objective =
        std::make_shared<LogisticProblem>(generate_synthetic_logistic(p).dataset, spec.lambda);
    built.strongly_convex = true;
  } else if (spec.type == "quartic") {
    Vector w_hat = Eigen::Map<const Vector>(spec.w_hat.data(),
                                            static_cast<Eigen::Index>(spec.w_hat.size()));
    auto inst = generate_quartic(spec.n, spec.d, w_hat, spec.noise_plan, spec.gen_seed);
    auto problem = std::make_shared<QuarticProblem>(std::move(inst));
    built.quartic = std::make_shared<const QuarticInstance>(problem->instance());
    built.objective = std::move(problem);
  } else {
    throw PreconditionError("unknown problem type '" + spec.type + "'");
  }
  return built;
}

// ---------------------------------------------------------------------------
// Single optimizer dispatch
// ---------------------------------------------------------------------------

inline Vector initial_point(const std::string& w0, int dim, uint64_t seed) {
  if (w0 == "zero") return Vector::Zero(dim);
  if (w0 == "random") {
    Rng rng(derive_seed(seed, 77));
    Vector w(dim);
    for (int k = 0; k < dim; ++k) w[k] = rng.gaussian();
    return w;
  }
  throw PreconditionError("w0 must be 'zero' or 'random'");
}

inline int64_t iterations_for(const OptimizerSpec& spec, size_t n) {
  if (spec.iterations > 0) return spec.iterations;
  if (spec.epochs > 0)
    return spec.epochs * static_cast<int64_t>(n) / std::max(1, spec.batch);
  throw PreconditionError("optimizer spec needs epochs or iterations");
}

inline RunResult dispatch_run(const ComponentObjective& problem, const Vector& w0,
                              const OptimizerSpec& spec, uint64_t seed, int64_t trace_every,
                              const TraceOptions& opts) {
  if (spec.algorithm == "sgd") {
    SgdConfig cfg;
    cfg.eta = spec.eta;
    cfg.batch = spec.batch;
    cfg.iterations = iterations_for(spec, problem.n());
    cfg.seed = seed;
    cfg.trace_every = trace_every > 0 ? trace_every : std::max<int64_t>(1, cfg.iterations / 50);
    cfg.sampling = spec.sampling == "shuffled" ? SgdConfig::Sampling::shuffled
                                               : SgdConfig::Sampling::with_replacement;
    return sgd_run(problem, w0, cfg, opts);
  }
  if (spec.algorithm == "gd") {
    GdConfig cfg;
    cfg.eta = spec.eta;
    cfg.iterations = iterations_for(spec, problem.n()) / static_cast<int64_t>(problem.n());
    if (cfg.iterations == 0) cfg.iterations = iterations_for(spec, problem.n());
    cfg.trace_every = trace_every > 0 ? trace_every : std::max<int64_t>(1, cfg.iterations / 50);
    return gd_run(problem, w0, cfg, opts);
  }
  if (spec.algorithm == "svrg") {
    SvrgConfig cfg;
    cfg.eta = spec.eta;
    cfg.inner_steps = spec.inner_steps;
    cfg.epochs = spec.epochs > 0 ? spec.epochs : 10;
    cfg.seed = seed;
    cfg.trace_every = trace_every;
    cfg.continuation = spec.continuation == "snapshot_average"
                           ? SvrgConfig::Continuation::snapshot_average
                           : SvrgConfig::Continuation::last_iterate;
    return svrg_run(problem, w0, cfg, opts);
  }
  if (spec.algorithm == "lbfgs") {
    LbfgsConfig cfg;
    cfg.memory = spec.memory;
    cfg.tolerance = spec.tolerance;
    cfg.max_iters = spec.max_iters;
    LbfgsResult res = lbfgs_run(problem, w0, cfg, opts);
    RunResult run;
    run.final_w = res.w;
    run.trace = std::move(res.trace);
    run.evals = res.evals;
    run.diverged = false;
    run.message = res.converged ? "" : "lbfgs stopped at max_iters";
    return run;
  }
  throw PreconditionError("unknown algorithm '" + spec.algorithm + "'");
}

// ---------------------------------------------------------------------------
// Experiment run + report
// ---------------------------------------------------------------------------

struct SeedOutcome {
  uint64_t seed = 0;
  std::string trace_file;
  Vector final_w;
  double final_f = 0.0;
  double final_grad_norm_sq = 0.0;
  std::optional<double> final_dist_sq;
  std::optional<double> gap;  // F(final) - F(w*)
  bool diverged = false;
  std::string message;
  Trace trace;
};

struct RunReport {
  std::string hash;
  json config_json;
  std::vector<SeedOutcome> seeds;
  GradientCensus census;
  std::string census_reference_hash;
  std::optional<double> epsilon_star;
  std::optional<double> f_star;
  std::string wstar_file;
  std::string wstar_hash;
  json bound_summary;  // null unless a strongly convex bound comparison ran
  double wall_clock_sec = 0.0;
};

namespace detail {

inline json census_to_json(const GradientCensus& census, const std::string& reference_hash) {
  json rows = json::array();
  for (const auto& r : census.rows) {
    json row{{"epsilon", r.epsilon}, {"p", r.p}, {"S_size", r.s_size},
             {"M_eps", r.m_eps ? json(*r.m_eps) : json(nullptr)},
             {"satisfied", r.condition_satisfied}};
    if (r.p_stderr) row["p_stderr"] = *r.p_stderr;
    rows.push_back(std::move(row));
  }
  return json{{"rows", std::move(rows)},
              {"M_max", census.m_max},
              {"mean_sq_norm", census.mean_sq_norm},
              {"batch", census.batch},
              {"mode", census.mode == CensusMode::exact ? "exact" : "monte_carlo"},
              {"draws", census.draws},
              {"reference_hash", reference_hash}};
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

inline json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace detail

/// Reference solution for census/bound work: L-BFGS solve for the convex
/// problems, the better-fitting of the two planted signs for the quartic.
inline Vector reference_point(const BuiltProblem& built, const Vector& hint = {}) {
  if (built.quartic) {
    const Vector& w_hat = built.quartic->w_hat;
    if (hint.size() == w_hat.size()) {
      return ((hint - w_hat).norm() <= (hint + w_hat).norm()) ? w_hat : Vector(-w_hat);
    }
    return w_hat;
  }
  LbfgsConfig cfg;
  cfg.tolerance = 1e-12;
  cfg.max_iters = 5000;
  return lbfgs_run(*built.objective, Vector::Zero(built.objective->dim()), cfg).w;
}

/// Execute all seeds of an experiment, write traces (CSV), census (JSON),
/// and the report (JSON + text table). Pure function of (config, data), so
/// a rerun reproduces byte-identical traces.
inline RunReport run_experiment(const ExperimentConfig& config, const std::string& data_dir = "") {
  namespace fs = std::filesystem;
  const auto t_start = std::chrono::steady_clock::now();

  if (config.seeds.empty()) throw PreconditionError("run_experiment: seed list must be nonempty");
  BuiltProblem built = build_problem(config.problem, data_dir);
  const ComponentObjective& problem = *built.objective;

  fs::create_directories(config.out_dir);

  // Reference point first; it feeds dist_sq tracking in every seed run.
  const bool do_reference = built.strongly_convex || built.quartic != nullptr;
  Vector w_star;
  LbfgsResult ref_solve;
  if (built.strongly_convex) {
    LbfgsConfig cfg;
    cfg.tolerance = 1e-12;
    cfg.max_iters = 5000;
    ref_solve = lbfgs_run(problem, Vector::Zero(problem.dim()), cfg);
    w_star = ref_solve.w;
  } else if (built.quartic) {
    w_star = reference_point(built);
  }

  RunReport report;
  report.config_json = config;
  report.hash = config_hash(config);

  // Per-seed runs; each writes only its own seed-suffixed file.
  std::vector<SeedOutcome> outcomes(config.seeds.size());
  auto run_one = [&](size_t idx) {
    const uint64_t seed = config.seeds[idx];
    SeedOutcome out;
    out.seed = seed;
    TraceOptions opts;
    if (do_reference) opts.reference = w_star;
    opts.accumulate_rt = config.diagnostics.accumulate_rt;
    Vector w0 = initial_point(config.w0, problem.dim(), seed);
    RunResult run = dispatch_run(problem, w0, config.optimizer, seed, config.trace_every, opts);
    out.final_w = run.final_w;
    out.diverged = run.diverged;
    out.message = run.message;
    if (!run.trace.rows.empty()) {
      const auto& last = run.trace.rows.back();
      out.final_f = last.f_value;
      out.final_grad_norm_sq = last.grad_norm_sq;
      out.final_dist_sq = last.dist_sq;
    }
    out.trace_file = "trace_seed" + std::to_string(seed) + ".csv";
    std::ofstream trace_out(fs::path(config.out_dir) / out.trace_file);
    run.trace.to_csv(trace_out);
    out.trace = std::move(run.trace);
    outcomes[idx] = std::move(out);
  };

  {
    // Seeds run concurrently, bounded by the hardware width.
    const size_t width = std::max<size_t>(1, std::thread::hardware_concurrency());
    for (size_t begin = 0; begin < config.seeds.size(); begin += width) {
      std::vector<std::future<void>> jobs;
      const size_t end = std::min(begin + width, config.seeds.size());
      for (size_t i = begin; i < end; ++i)
        jobs.push_back(std::async(std::launch::async, run_one, i));
      for (auto& j : jobs) j.get();
    }
  }

  // Aggregation below is single-threaded. For the quartic both planted
  // signs are global solutions; census at the one the first run approached.
  if (built.quartic) {
    for (const auto& out : outcomes) {
      if (!out.diverged) {
        w_star = reference_point(built, out.final_w);
        break;
      }
    }
  }

  if (do_reference && built.strongly_convex) {
    json wstar_doc{{"vector", detail::vector_to_json(w_star)},
                   {"grad_norm", ref_solve.grad_norm},
                   {"f_value", ref_solve.f_value},
                   {"iterations", ref_solve.iterations},
                   {"converged", ref_solve.converged},
                   {"solver", "lbfgs"},
                   {"hash", hash_hex(hash_vector(w_star))}};
    report.wstar_file = "wstar.json";
    detail::write_text_file(fs::path(config.out_dir) / report.wstar_file, wstar_doc.dump(2) + "\n");
    report.f_star = ref_solve.f_value;
  } else if (built.quartic) {
    json wstar_doc{{"vector", detail::vector_to_json(w_star)},
                   {"f_value", problem.full_value(w_star)},
                   {"solver", "planted"},
                   {"hash", hash_hex(hash_vector(w_star))}};
    report.wstar_file = "wstar.json";
    detail::write_text_file(fs::path(config.out_dir) / report.wstar_file, wstar_doc.dump(2) + "\n");
    report.f_star = problem.full_value(w_star);
  }
  report.wstar_hash = hash_hex(hash_vector(w_star));

  for (auto& out : outcomes) {
    if (report.f_star) out.gap = out.final_f - *report.f_star;
    report.seeds.push_back(std::move(out));
  }

  // Census at the reference point.
  report.census = gradient_census(
      problem, w_star, config.diagnostics.epsilon_grid, config.diagnostics.census_batch,
      config.diagnostics.census_mode == "monte_carlo" ? CensusMode::monte_carlo : CensusMode::exact,
      config.diagnostics.k_draws, derive_seed(config.seeds.front(), 99));
  report.census_reference_hash = hash_hex(hash_vector(report.census.reference));
  report.epsilon_star = check_epsilon_condition(report.census);

  const json census_json = detail::census_to_json(report.census, report.census_reference_hash);
  detail::write_text_file(fs::path(config.out_dir) / "census.json", census_json.dump(2) + "\n");

  // Bound-vs-trace comparison (report only; the theorems bound expectations,
  // so per-seed exceedances are recorded, not failed).
  report.bound_summary = json(nullptr);
  const auto sc = problem.strong_convexity();
  if (built.quartic && config.optimizer.algorithm == "sgd" && report.epsilon_star &&
      config.diagnostics.accumulate_rt) {
    // Nonconvex regime: compare the running average of |grad F|^2 (exact,
    // carried by the r_t denominator sums) with the drift-constant bound.
    // F* = 0, the quartic loss being nonnegative.
    double n_hat = 0.0;
    for (const auto& seed_out : report.seeds)
      for (const auto& row : seed_out.trace.rows)
        if (auto r = row.rt()) n_hat = std::max(n_hat, *r);
    bounds::BoundInputs in;
    in.L = problem.smoothness().value;
    in.eta = config.optimizer.eta;
    in.epsilon = *report.epsilon_star;
    for (const auto& row : report.census.rows) {
      if (row.epsilon == *report.epsilon_star) {
        in.p_eps = row.p;
        in.m_eps = row.m_eps;
      }
    }
    in.n_constant = n_hat;
    if (n_hat <= 0 || in.eta >= 1.0 / (in.L * n_hat)) {
      report.bound_summary =
          json{{"regime", "nonconvex"},
               {"n_hat", n_hat},
               {"note", "step size violates eta < 1/(L N_hat); bound not evaluable"}};
    } else {
      size_t checkpoints = 0, violations = 0;
      double max_ratio = 0.0;
      for (const auto& seed_out : report.seeds) {
        if (seed_out.diverged) continue;
        in.f0_gap = seed_out.trace.rows.empty() ? 0.0 : seed_out.trace.rows.front().f_value;
        for (const auto& row : seed_out.trace.rows) {
          if (!row.rt_denominator) continue;
          const double measured = *row.rt_denominator / static_cast<double>(row.t + 1);
          const double bound = bounds::nonconvex(in, static_cast<double>(row.t));
          ++checkpoints;
          if (measured > bound) ++violations;
          if (bound > 0) max_ratio = std::max(max_ratio, measured / bound);
        }
      }
      report.bound_summary = json{{"regime", "nonconvex"},
                                  {"epsilon", in.epsilon},
                                  {"n_hat", n_hat},
                                  {"checkpoints", checkpoints},
                                  {"violations", violations},
                                  {"max_measured_over_bound", max_ratio},
                                  {"note", "per-seed trajectories; the theorem bounds expectations"}};
    }
  }
  if (built.strongly_convex && config.optimizer.algorithm == "sgd" && report.epsilon_star && sc &&
      *sc > 0 && config.optimizer.eta <= 1.0 / problem.smoothness().value) {
    bounds::BoundInputs in;
    in.mu = *sc;
    in.L = problem.smoothness().value;
    in.eta = config.optimizer.eta;
    in.epsilon = *report.epsilon_star;
    for (const auto& row : report.census.rows) {
      if (row.epsilon == *report.epsilon_star) {
        in.p_eps = row.p;
        in.m_eps = row.m_eps;
      }
    }
    size_t checkpoints = 0, violations = 0;
    double max_ratio = 0.0;
    for (const auto& seed_out : report.seeds) {
      if (seed_out.diverged || seed_out.trace.rows.empty()) continue;
      const auto& rows = seed_out.trace.rows;
      if (!rows.front().dist_sq) continue;
      in.dist0_sq = *rows.front().dist_sq;
      for (const auto& row : rows) {
        if (!row.dist_sq) continue;
        const double bound = bounds::strongly_convex(in, static_cast<double>(row.t));
        ++checkpoints;
        if (*row.dist_sq > bound) ++violations;
        if (bound > 0) max_ratio = std::max(max_ratio, *row.dist_sq / bound);
      }
    }
    report.bound_summary =
        json{{"regime", "strongly_convex"}, {"epsilon", in.epsilon},
             {"checkpoints", checkpoints},  {"violations", violations},
             {"max_measured_over_bound", max_ratio},
             {"note", "per-seed trajectories; the theorem bounds expectations"}};
  }

  report.wall_clock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  // report.json + human-readable summary table.
  json per_seed = json::array();
  for (const auto& s : report.seeds) {
    json row{{"seed", s.seed},
             {"trace_file", s.trace_file},
             {"final_F", s.final_f},
             {"final_grad_norm_sq", s.final_grad_norm_sq},
             {"diverged", s.diverged}};
    if (s.final_dist_sq) row["final_dist_sq"] = *s.final_dist_sq;
    if (s.gap) row["gap"] = *s.gap;
    if (!s.message.empty()) row["message"] = s.message;
    per_seed.push_back(std::move(row));
  }
  // Minimum across seeds, mirroring the report-the-minimum convention for
  // multi-seed stochastic runs.
  std::optional<double> gap_min;
  for (const auto& s : report.seeds)
    if (s.gap && !s.diverged && (!gap_min || *s.gap < *gap_min)) gap_min = *s.gap;

  json report_json{{"config", report.config_json},
                   {"config_hash", report.hash},
                   {"gap_min", gap_min ? json(*gap_min) : json(nullptr)},
                   {"per_seed", std::move(per_seed)},
                   {"census", census_json},
                   {"epsilon_star", report.epsilon_star ? json(*report.epsilon_star) : json(nullptr)},
                   {"f_star", report.f_star ? json(*report.f_star) : json(nullptr)},
                   {"wstar_file", report.wstar_file},
                   {"wstar_hash", report.wstar_hash},
                   {"bound_summary", report.bound_summary},
                   {"wall_clock_sec", report.wall_clock_sec}};
  detail::write_text_file(fs::path(config.out_dir) / "report.json", report_json.dump(2) + "\n");

  std::string table = "gradient census at the reference point\n" + report.census.to_table();
  table += "\nper-seed results\n";
  for (const auto& s : report.seeds) {
    table += "  seed " + std::to_string(s.seed);
    if (s.diverged) table += "  DIVERGED " + s.message;
    else if (s.gap) table += "  F - F* = " + format_double(*s.gap);
    else table += "  F = " + format_double(s.final_f);
    table += "\n";
  }
  if (gap_min) table += "  minimum across seeds: F - F* = " + format_double(*gap_min) + "\n";
  if (report.epsilon_star)
    table += "\nsmallest grid epsilon with 1 - p <= epsilon: " + format_double(*report.epsilon_star) + "\n";
  else
    table += "\nno grid epsilon satisfies 1 - p <= epsilon\n";
  detail::write_text_file(fs::path(config.out_dir) / "report.txt", table);

  return report;
}

// ---------------------------------------------------------------------------
// Quartic scenarios (signal-recovery dichotomy)
// ---------------------------------------------------------------------------

struct QuarticScenarioConfig {
  size_t n = 100;
  int d = 2;
  std::vector<double> w_hat = {1.0, 0.5};
  std::vector<double> w0 = {2.0, 2.0};
  double eta_scale = 2.5;  // eta = eta_scale / local smoothness estimate
  int64_t iterations = 20000;
  uint64_t gen_seed = 7;
  int64_t trace_every = 20;
};

struct QuarticScenarioReport {
  std::string scenario;  // "i" or "ii"
  uint64_t seed = 0;
  double eta = 0.0;
  double smoothness_estimate = 0.0;
  double min_dist_over_t = 0.0;   // min over kept t of min(|w - w_hat|, |w + w_hat|)
  double terminal_dist = 0.0;     // same metric at the final iterate
  double oscillation_radius = 0.0;  // max pairwise distance, last 20% of iterates
  double n_hat = 0.0;
  bool rt_degenerate = false;
  std::vector<std::pair<int64_t, double>> rt_curve;  // (t, running r_t), subsampled
  Trace trace;
};

inline QuarticScenarioReport scenario_quartic(const std::string& scenario, uint64_t seed,
                                              const QuarticScenarioConfig& cfg = {}) {
  if (scenario != "i" && scenario != "ii")
    throw PreconditionError("scenario must be 'i' or 'ii'");

  Vector w_hat = Eigen::Map<const Vector>(cfg.w_hat.data(),
                                          static_cast<Eigen::Index>(cfg.w_hat.size()));
  const NoisePlan plan =
      scenario == "i" ? NoisePlan::scenario_i() : NoisePlan::scenario_ii(cfg.n);
  QuarticInstance inst = generate_quartic(cfg.n, cfg.d, w_hat, plan, cfg.gen_seed);

  Vector w0 = Eigen::Map<const Vector>(cfg.w0.data(), static_cast<Eigen::Index>(cfg.w0.size()));
  ProbeConfig probe;
  probe.center = w0;
  probe.radius = w0.norm() + w_hat.norm() + 1.0;
  QuarticProblem problem(std::move(inst), probe);

  QuarticScenarioReport rep;
  rep.scenario = scenario;
  rep.seed = seed;
  rep.smoothness_estimate = problem.smoothness().value;
  rep.eta = cfg.eta_scale / rep.smoothness_estimate;

  SgdConfig sgd;
  sgd.eta = rep.eta;
  sgd.batch = 1;
  sgd.iterations = cfg.iterations;
  sgd.seed = seed;
  sgd.trace_every = cfg.trace_every;

  TraceOptions opts;
  opts.keep_every = 1;
  RunResult run = sgd_run(problem, w0, sgd, opts);
  rep.trace = std::move(run.trace);

  auto dist_to_signs = [&](const Vector& w) {
    return std::min((w - w_hat).norm(), (w + w_hat).norm());
  };
  rep.min_dist_over_t = dist_to_signs(run.kept_iterates.front());
  for (const auto& w : run.kept_iterates)
    rep.min_dist_over_t = std::min(rep.min_dist_over_t, dist_to_signs(w));
  rep.terminal_dist = dist_to_signs(run.final_w);

  const size_t tail_begin = run.kept_iterates.size() - run.kept_iterates.size() / 5;
  double radius = 0.0;
  for (size_t a = tail_begin; a < run.kept_iterates.size(); ++a)
    for (size_t b = a + 1; b < run.kept_iterates.size(); ++b)
      radius = std::max(radius, (run.kept_iterates[a] - run.kept_iterates[b]).norm());
  rep.oscillation_radius = radius;

  const Vector w_ref = dist_to_signs(run.final_w) == (run.final_w - w_hat).norm()
                           ? w_hat
                           : Vector(-w_hat);
  RtEstimate rt = rt_trace(problem, run.kept_iterates, w_ref);
  rep.n_hat = rt.n_hat;
  rep.rt_degenerate = rt.degenerate;
  const size_t stride = std::max<size_t>(1, static_cast<size_t>(cfg.trace_every));
  for (size_t k = 0; k < rt.rt.size(); k += stride)
    rep.rt_curve.emplace_back(run.kept_steps[k], rt.rt[k]);
  rep.rt_curve.emplace_back(run.kept_steps.back(), rt.rt.back());
  return rep;
}

// ---------------------------------------------------------------------------
// Optimizer comparison (aligned by cumulative component-gradient evaluations)
// ---------------------------------------------------------------------------

struct CompareEntry {
  std::string name;
  OptimizerSpec optimizer;
};

struct CompareResult {
  std::vector<std::string> names;
  std::vector<Trace> traces;
  double f_star = 0.0;
  std::string csv;
};

/// F-gap of the latest trace row at or before `evals` (step interpolation).
inline double gap_at(const Trace& trace, uint64_t evals, double f_star) {
  if (trace.rows.empty()) throw PreconditionError("gap_at: empty trace");
  double value = trace.rows.front().f_value;
  for (const auto& row : trace.rows) {
    if (row.evals > evals) break;
    value = row.f_value;
  }
  return value - f_star;
}

/// Run each configured algorithm on the same problem from the same start and
/// align the runs on the shared evals axis. Columns carry F(w) - F(w*).
inline CompareResult compare_optimizers(const ComponentObjective& problem, const Vector& w0,
                                        const std::vector<CompareEntry>& entries, uint64_t seed,
                                        double f_star, int64_t trace_every = 0) {
  if (entries.empty()) throw PreconditionError("compare_optimizers: empty algorithm set");
  CompareResult result;
  result.f_star = f_star;

  for (const auto& entry : entries) {
    result.names.push_back(entry.name);
    RunResult run = dispatch_run(problem, w0, entry.optimizer, seed, trace_every, {});
    result.traces.push_back(std::move(run.trace));
  }

  std::set<uint64_t> checkpoints;
  for (const auto& trace : result.traces)
    for (const auto& row : trace.rows) checkpoints.insert(row.evals);

  std::string csv = "evals";
  for (const auto& name : result.names) csv += "," + name;
  csv += "\n";
  for (uint64_t e : checkpoints) {
    csv += std::to_string(e);
    for (const auto& trace : result.traces) csv += "," + format_double(gap_at(trace, e, f_star));
    csv += "\n";
  }
  result.csv = std::move(csv);
  return result;
}

/// The config-schema document: every default spelled out plus field notes.
inline json config_schema() {
  const ExperimentConfig defaults;
  json doc;
  doc["defaults"] = defaults;
  doc["fields"] = {
      {"problem.type", "libsvm | synthetic_logistic | quartic"},
      {"problem.path", "LIBSVM file (gzip accepted when the name ends .gz); resolved against --data-dir then $SGD_LAB_DATA"},
      {"problem.lambda", "l2 penalty; negative selects the 1/n default"},
      {"problem.label_map", "raw label (as a string key) -> -1 or +1, for label sets beyond {-1,+1} and {0,1}"},
      {"problem.dimension_override", "force dimension upward (0 = max index seen)"},
      {"problem.max_abs_scale", "divide each feature column by its max |value|"},
      {"problem.margin", "synthetic logistic hard margin"},
      {"problem.noise_std", "synthetic logistic cloud scale"},
      {"problem.flip_fraction", "fraction of labels flipped after placement"},
      {"problem.w_hat", "quartic planted signal"},
      {"problem.noise_plan", "quartic noise energies relative to the clean signal"},
      {"optimizer.algorithm", "sgd | svrg | gd | lbfgs"},
      {"optimizer.epochs", "one epoch = n component-gradient evaluations"},
      {"optimizer.iterations", "direct step count; overrides epochs"},
      {"optimizer.sampling", "with_replacement (i.i.d., the analyzed scheme) | shuffled"},
      {"optimizer.inner_steps", "svrg m; 0 selects 2n"},
      {"optimizer.continuation", "svrg restart: last_iterate | snapshot_average"},
      {"diagnostics.epsilon_grid", "ascending census thresholds"},
      {"diagnostics.census_mode", "exact (b=1 enumeration) | monte_carlo (K draws)"},
      {"diagnostics.accumulate_rt", "track the r_t running sums every step (costly)"},
      {"seeds", "per-seed runs execute concurrently and write seed-suffixed traces"},
      {"trace_every", "steps between trace rows; 0 targets ~50 rows"},
      {"w0", "zero | random (seeded per run)"},
  };
  return doc;
}

}  // namespace sgdlab
