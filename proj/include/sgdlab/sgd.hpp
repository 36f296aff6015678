#pragma once

#include "sgdlab/objective.hpp"
#include "sgdlab/rng.hpp"
#include "sgdlab/trace.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace sgdlab {

struct SgdConfig {
  double eta = 0.1;
  int batch = 1;
  int64_t iterations = 0;
  uint64_t seed = 0;
  int64_t trace_every = 0;  // 0 -> only t=0 and t=T
  /// i.i.d. uniform draws with replacement match the analyzed scheme; the
  /// shuffled mode exists for comparison runs only.
  enum class Sampling { with_replacement, shuffled } sampling = Sampling::with_replacement;
};

/// Fixed-step minibatch SGD: w <- w - eta * g, g the mean of `batch` fresh
/// uniformly drawn component gradients. Exactly `iterations` updates; trace
/// rows at t = 0, every trace_every steps, and t = iterations. A run is a
/// pure function of (problem, w0, config), so equal seeds give bit-identical
/// traces.
inline RunResult sgd_run(const ComponentObjective& problem, const Vector& w0,
                         const SgdConfig& cfg, const TraceOptions& opts = {}) {
  if (cfg.eta <= 0) throw PreconditionError("sgd_run: eta must be positive");
  if (cfg.batch < 1) throw PreconditionError("sgd_run: batch must be >= 1");
  if (cfg.iterations < 0) throw PreconditionError("sgd_run: iterations must be >= 0");
  if (w0.size() != problem.dim()) throw PreconditionError("sgd_run: w0 has wrong dimension");

  detail::RunRecorder rec(problem, opts);
  Rng rng(cfg.seed);
  const size_t n = problem.n();

  std::vector<size_t> order;
  size_t cursor = 0;
  auto draw = [&]() -> size_t {
    if (cfg.sampling == SgdConfig::Sampling::with_replacement) return rng.uniform_index(n);
    if (cursor == order.size()) {
      if (order.empty()) {
        order.resize(n);
        std::iota(order.begin(), order.end(), size_t{0});
      }
      for (size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
      cursor = 0;
    }
    return order[cursor++];
  };

  Vector w = w0;
  Vector w_prev = w0;
  Vector g(problem.dim()), gi(problem.dim());
  uint64_t evals = 0;

  rec.visit(0, w);
  rec.log(0, evals, w);

  for (int64_t t = 0; t < cfg.iterations; ++t) {
    g.setZero();
    for (int j = 0; j < cfg.batch; ++j) {
      problem.component_grad(draw(), w, gi);
      g += gi;
    }
    evals += static_cast<uint64_t>(cfg.batch);
    w_prev = w;
    w -= (cfg.eta / cfg.batch) * g;

    if (rec.diverged(w)) {
      rec.log(t, evals, w_prev);  // last finite iterate
      return rec.take(std::move(w_prev), evals, true,
                      "sgd diverged at t=" + std::to_string(t + 1));
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
