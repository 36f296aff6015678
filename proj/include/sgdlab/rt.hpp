#pragma once

#include "sgdlab/core.hpp"
#include "sgdlab/objective.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace sgdlab {

/// Running ratio
///   r_t = [sum_k (1/n) sum_i |grad f_i(w_k) - grad f_i(w*)|^2]
///         / [sum_k |grad F(w_k)|^2]
/// over iterate prefixes; its maximum N_hat estimates the constant relating
/// average stochastic-gradient drift to the average true squared gradient.
/// The ratio is formed from the two running sums, never from per-term
/// ratios, so near-stationary iterates only flag a guard rather than blow up.
struct RtEstimate {
  std::vector<double> numerator_terms;    // per-iterate (1/n) sum_i |...|^2
  std::vector<double> denominator_terms;  // per-iterate |grad F(w_k)|^2
  std::vector<double> rt;                 // running ratio after each prefix
  double n_hat = 0.0;
  /// Set when some |grad F(w_k)|^2 fell below the guard threshold; with a
  /// fully degenerate denominator the ratio is reported as 0.
  bool degenerate = false;

  static constexpr double kDenominatorGuard = 1e-30;
};

inline RtEstimate rt_trace(const ComponentObjective& problem, std::span<const Vector> iterates,
                           const Vector& w_star) {
  if (iterates.empty()) throw PreconditionError("rt_trace: empty iterate sequence");
  if (w_star.size() != problem.dim()) throw PreconditionError("rt_trace: w_star has wrong dimension");

  const size_t n = problem.n();
  std::vector<Vector> ref_grads(n);
  for (size_t i = 0; i < n; ++i) ref_grads[i] = problem.component_grad(i, w_star);

  RtEstimate est;
  est.numerator_terms.reserve(iterates.size());
  est.denominator_terms.reserve(iterates.size());
  est.rt.reserve(iterates.size());

  KahanAccumulator num_sum, den_sum;
  Vector g(problem.dim());
  for (const Vector& w : iterates) {
    KahanAccumulator num_k;
    for (size_t i = 0; i < n; ++i) {
      problem.component_grad(i, w, g);
      num_k.add((g - ref_grads[i]).squaredNorm());
    }
    const double num_term = num_k.value() / static_cast<double>(n);
    problem.full_grad(w, g);
    const double den_term = g.squaredNorm();
    if (den_term < RtEstimate::kDenominatorGuard) est.degenerate = true;

    est.numerator_terms.push_back(num_term);
    est.denominator_terms.push_back(den_term);
    num_sum.add(num_term);
    den_sum.add(den_term);
    est.rt.push_back(den_sum.value() == 0.0 ? 0.0 : num_sum.value() / den_sum.value());
  }

  for (double r : est.rt) est.n_hat = std::max(est.n_hat, r);
  return est;
}

}  // namespace sgdlab
