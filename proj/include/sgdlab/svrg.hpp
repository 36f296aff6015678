#pragma once

#include "sgdlab/objective.hpp"
#include "sgdlab/rng.hpp"
#include "sgdlab/trace.hpp"

#include <cstdint>
#include <string>

namespace sgdlab {

struct SvrgConfig {
  double eta = 0.1;
  int64_t inner_steps = 0;  // m; 0 -> defaults to 2n
  int64_t epochs = 0;
  uint64_t seed = 0;
  int64_t trace_every = 0;  // in inner steps; epoch boundaries always logged
  enum class Continuation { last_iterate, snapshot_average } continuation =
      Continuation::last_iterate;
};

/// Variance-reduced SGD: per epoch, one full-gradient snapshot at w_tilde
/// followed by m steps with v = grad f_i(w) - grad f_i(w_tilde) + grad
/// F(w_tilde). Eval accounting charges n per snapshot and 1 per inner step.
inline RunResult svrg_run(const ComponentObjective& problem, const Vector& w0,
                          const SvrgConfig& cfg, const TraceOptions& opts = {}) {
  if (cfg.eta <= 0) throw PreconditionError("svrg_run: eta must be positive");
  if (cfg.epochs < 0) throw PreconditionError("svrg_run: epochs must be >= 0");
  if (cfg.inner_steps < 0) throw PreconditionError("svrg_run: inner_steps must be >= 0");
  if (w0.size() != problem.dim()) throw PreconditionError("svrg_run: w0 has wrong dimension");

  const size_t n = problem.n();
  const int64_t m = cfg.inner_steps > 0 ? cfg.inner_steps : 2 * static_cast<int64_t>(n);

  detail::RunRecorder rec(problem, opts);
  Rng rng(cfg.seed);

  Vector w = w0;
  Vector w_prev = w0;
  Vector snapshot = w0;
  Vector snapshot_grad(problem.dim());
  Vector gi(problem.dim()), gi_snap(problem.dim());
  uint64_t evals = 0;
  int64_t t = 0;  // cumulative inner steps

  rec.visit(0, w);
  rec.log(0, evals, w);

  for (int64_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    snapshot = w;
    problem.full_grad(snapshot, snapshot_grad);
    evals += n;

    Vector epoch_sum = Vector::Zero(problem.dim());
    for (int64_t j = 0; j < m; ++j) {
      const size_t i = rng.uniform_index(n);
      problem.component_grad(i, w, gi);
      problem.component_grad(i, snapshot, gi_snap);
      evals += 1;
      w_prev = w;
      w -= cfg.eta * (gi - gi_snap + snapshot_grad);
      ++t;

      if (rec.diverged(w)) {
        rec.log(t - 1, evals, w_prev);
        return rec.take(std::move(w_prev), evals, true,
                        "svrg diverged at inner step t=" + std::to_string(t));
      }
      rec.visit(t, w);
      if (cfg.continuation == SvrgConfig::Continuation::snapshot_average) epoch_sum += w;
      if (cfg.trace_every > 0 && j + 1 < m && t % cfg.trace_every == 0) rec.log(t, evals, w);
    }
    if (cfg.continuation == SvrgConfig::Continuation::snapshot_average && m > 0) {
      w = epoch_sum / static_cast<double>(m);
    }
    rec.log(t, evals, w);
  }
  return rec.take(std::move(w), evals, false, "");
}

}  // namespace sgdlab
