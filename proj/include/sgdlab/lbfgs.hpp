#pragma once

#include "sgdlab/objective.hpp"
#include "sgdlab/trace.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <string>

namespace sgdlab {

struct LbfgsConfig {
  int memory = 10;
  double tolerance = 1e-12;  // on |grad F|
  int64_t max_iters = 1000;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_linesearch = 60;
};

struct LbfgsResult {
  Vector w;
  double f_value = 0.0;
  double grad_norm = 0.0;
  int64_t iterations = 0;
  bool converged = false;
  int linesearch_fallbacks = 0;
  uint64_t evals = 0;
  Trace trace;
};

namespace detail {

struct LinesearchEval {
  double f;
  double slope;  // grad F(w + a p) . p
};

}  // namespace detail

/// Limited-memory BFGS with two-loop recursion and a strong-Wolfe line
/// search (bracket + zoom). On a line-search failure the step falls back to
/// scaled steepest descent and the run continues; the fallback count is
/// reported.
inline LbfgsResult lbfgs_run(const ComponentObjective& problem, const Vector& w0,
                             const LbfgsConfig& cfg = {}, const TraceOptions& opts = {}) {
  if (cfg.memory < 1) throw PreconditionError("lbfgs_run: memory must be >= 1");
  if (cfg.tolerance <= 0) throw PreconditionError("lbfgs_run: tolerance must be positive");
  if (w0.size() != problem.dim()) throw PreconditionError("lbfgs_run: w0 has wrong dimension");

  detail::RunRecorder rec(problem, opts);
  LbfgsResult res;
  const size_t n = problem.n();

  Vector w = w0;
  Vector grad(problem.dim()), grad_new(problem.dim());
  double f = problem.full_value(w);
  problem.full_grad(w, grad);
  res.evals += n;

  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;

  auto eval = [&](const Vector& point, Vector& grad_out) -> double {
    problem.full_grad(point, grad_out);
    res.evals += n;
    return problem.full_value(point);
  };

  rec.visit(0, w);
  rec.log(0, res.evals, w);

  int64_t iter = 0;
  for (; iter < cfg.max_iters && grad.norm() > cfg.tolerance; ++iter) {
    // Two-loop recursion for p = -H grad.
    Vector q = grad;
    std::vector<double> alpha(s_hist.size());
    for (size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * s_hist[k].dot(q);
      q -= alpha[k] * y_hist[k];
    }
    if (!s_hist.empty()) {
      const auto& s = s_hist.back();
      const auto& y = y_hist.back();
      q *= s.dot(y) / y.squaredNorm();
    }
    for (size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * y_hist[k].dot(q);
      q += (alpha[k] - beta) * s_hist[k];
    }
    Vector p = -q;

    double slope0 = grad.dot(p);
    if (slope0 >= 0) {  // not a descent direction; reset to steepest descent
      p = -grad;
      slope0 = grad.dot(p);
    }

    // Strong Wolfe line search (bracketing phase + zoom), c1/c2 conventional.
    const double c1 = cfg.wolfe_c1, c2 = cfg.wolfe_c2;
    double a_prev = 0.0, f_prev = f;
    double a = 1.0;
    double a_lo = 0.0, a_hi = 0.0, f_lo = f;
    bool bracketed = false, found = false;
    double a_star = 0.0, f_star = f;
    Vector w_trial(problem.dim());

    for (int ls = 0; ls < cfg.max_linesearch; ++ls) {
      w_trial = w + a * p;
      const double f_a = eval(w_trial, grad_new);
      const double slope_a = grad_new.dot(p);
      if (f_a > f + c1 * a * slope0 || (ls > 0 && f_a >= f_prev)) {
        a_lo = a_prev;
        f_lo = f_prev;
        a_hi = a;
        bracketed = true;
        break;
      }
      if (std::fabs(slope_a) <= -c2 * slope0) {
        a_star = a;
        f_star = f_a;
        found = true;
        break;
      }
      if (slope_a >= 0) {
        a_lo = a;
        f_lo = f_a;
        a_hi = a_prev;
        bracketed = true;
        break;
      }
      a_prev = a;
      f_prev = f_a;
      a *= 2.0;
    }

    if (bracketed && !found) {
      for (int z = 0; z < cfg.max_linesearch; ++z) {
        a = 0.5 * (a_lo + a_hi);
        w_trial = w + a * p;
        const double f_a = eval(w_trial, grad_new);
        const double slope_a = grad_new.dot(p);
        if (f_a > f + c1 * a * slope0 || f_a >= f_lo) {
          a_hi = a;
        } else {
          if (std::fabs(slope_a) <= -c2 * slope0) {
            a_star = a;
            f_star = f_a;
            found = true;
            break;
          }
          if (slope_a * (a_hi - a_lo) >= 0) a_hi = a_lo;
          a_lo = a;
          f_lo = f_a;
        }
        if (std::fabs(a_hi - a_lo) < 1e-16 * std::max(1.0, std::fabs(a_lo))) break;
      }
    }

    Vector w_new;
    if (found) {
      // grad_new already holds grad F at the accepted point.
      w_new = w + a_star * p;
    } else {
      // Fallback: scaled steepest descent, then rebuild curvature pairs.
      ++res.linesearch_fallbacks;
      const double L = problem.smoothness().value;
      const double step = (L > 0 && std::isfinite(L)) ? 1.0 / L : 1e-4 / std::max(1.0, grad.norm());
      w_new = w - step * grad;
      f_star = eval(w_new, grad_new);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    Vector s = w_new - w;
    Vector y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > cfg.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    w = std::move(w_new);
    f = f_star;
    grad = grad_new;
    rec.visit(iter + 1, w);
    rec.log(iter + 1, res.evals, w);
  }

  res.w = w;
  res.f_value = f;
  res.grad_norm = grad.norm();
  res.iterations = iter;
  res.converged = res.grad_norm <= cfg.tolerance;
  RunResult run = rec.take(res.w, res.evals, false, "");
  res.trace = std::move(run.trace);
  return res;
}

}  // namespace sgdlab
