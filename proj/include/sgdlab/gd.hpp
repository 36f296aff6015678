#pragma once

#include "sgdlab/objective.hpp"
#include "sgdlab/trace.hpp"

#include <cstdint>
#include <string>

namespace sgdlab {

struct GdConfig {
  double eta = 0.1;
  int64_t iterations = 0;
  int64_t trace_every = 0;
};

/// Full-batch gradient descent, w <- w - eta * grad F(w). Deterministic.
inline RunResult gd_run(const ComponentObjective& problem, const Vector& w0, const GdConfig& cfg,
                        const TraceOptions& opts = {}) {
  if (cfg.eta <= 0) throw PreconditionError("gd_run: eta must be positive");
  if (cfg.iterations < 0) throw PreconditionError("gd_run: iterations must be >= 0");
  if (w0.size() != problem.dim()) throw PreconditionError("gd_run: w0 has wrong dimension");

  detail::RunRecorder rec(problem, opts);
  Vector w = w0;
  Vector w_prev = w0;
  Vector g(problem.dim());
  uint64_t evals = 0;

  rec.visit(0, w);
  rec.log(0, evals, w);

  for (int64_t t = 0; t < cfg.iterations; ++t) {
    problem.full_grad(w, g);
    evals += problem.n();
    w_prev = w;
    w -= cfg.eta * g;

    if (rec.diverged(w)) {
      rec.log(t, evals, w_prev);
      return rec.take(std::move(w_prev), evals, true,
                      "gd diverged at t=" + std::to_string(t + 1));
    }
    rec.visit(t + 1, w);
    const bool last = t + 1 == cfg.iterations;
    if (last || (cfg.trace_every > 0 && (t + 1) % cfg.trace_every == 0)) {
      rec.log(t + 1, evals, w);
    }
  }
  return rec.take(std::move(w), evals, false, "");
}

}  // namespace sgdlab
