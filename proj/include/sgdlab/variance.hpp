#pragma once

#include "sgdlab/core.hpp"
#include "sgdlab/objective.hpp"
#include "sgdlab/rng.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace sgdlab {

/// Check of the minibatch variance identity
///   E |(1/b) sum grad f(w;xi_i) - grad F(w)|^2
///     = (E |grad f(w;xi_1)|^2 - |grad F(w)|^2) / b.
/// The left side is measured (exhaustively or by sampling) while the right
/// side is always computed from the exact per-component statistics, so the
/// two routes stay independent.
struct MinibatchIdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // |lhs - rhs|
  bool exhaustive = false;
  uint64_t tuples = 0;                // enumerated tuples or sampled draws
  std::optional<double> lhs_stderr;   // sampled mode only
};

namespace detail {

inline double exact_identity_rhs(const std::vector<Vector>& grads, const Vector& mean_grad,
                                 int batch) {
  std::vector<double> sq(grads.size());
  for (size_t i = 0; i < grads.size(); ++i) sq[i] = grads[i].squaredNorm();
  return (pairwise_mean(sq) - mean_grad.squaredNorm()) / static_cast<double>(batch);
}

}  // namespace detail

/// Exhaustive mode: enumerate all n^b with-replacement tuples, each with
/// probability n^-b. Refuses when n^b exceeds `tuple_cap`.
inline MinibatchIdentityReport verify_minibatch_identity_exhaustive(
    const ComponentObjective& problem, const Vector& w, int batch, uint64_t tuple_cap = 10000000) {
  if (batch < 1) throw PreconditionError("verify_minibatch_identity: batch must be >= 1");
  const size_t n = problem.n();

  double total_d = 1.0;
  for (int j = 0; j < batch; ++j) total_d *= static_cast<double>(n);
  if (total_d > static_cast<double>(tuple_cap))
    throw PreconditionError("verify_minibatch_identity: n^b exceeds the exhaustive cap");
  const uint64_t total = static_cast<uint64_t>(total_d);

  std::vector<Vector> grads(n);
  for (size_t i = 0; i < n; ++i) grads[i] = problem.component_grad(i, w);
  Vector mean_grad(problem.dim());
  problem.full_grad(w, mean_grad);

  std::vector<int> odo(static_cast<size_t>(batch), 0);
  Vector g(problem.dim());
  KahanAccumulator lhs_acc;
  for (uint64_t k = 0; k < total; ++k) {
    g.setZero();
    for (int j = 0; j < batch; ++j) g += grads[static_cast<size_t>(odo[j])];
    g /= static_cast<double>(batch);
    lhs_acc.add((g - mean_grad).squaredNorm());
    for (int j = 0; j < batch; ++j) {
      if (++odo[j] < static_cast<int>(n)) break;
      odo[j] = 0;
    }
  }

  MinibatchIdentityReport report;
  report.exhaustive = true;
  report.tuples = total;
  report.lhs = lhs_acc.value() / static_cast<double>(total);
  report.rhs = detail::exact_identity_rhs(grads, mean_grad, batch);
  report.residual = std::fabs(report.lhs - report.rhs);
  return report;
}

/// Sampled mode: K i.i.d. minibatch draws; reports the LHS estimate with its
/// standard error against the exact RHS.
inline MinibatchIdentityReport verify_minibatch_identity_sampled(const ComponentObjective& problem,
                                                                 const Vector& w, int batch,
                                                                 uint64_t k_draws, uint64_t seed) {
  if (batch < 1) throw PreconditionError("verify_minibatch_identity: batch must be >= 1");
  if (k_draws < 2) throw PreconditionError("verify_minibatch_identity: need K >= 2 draws");
  const size_t n = problem.n();

  std::vector<Vector> grads(n);
  for (size_t i = 0; i < n; ++i) grads[i] = problem.component_grad(i, w);
  Vector mean_grad(problem.dim());
  problem.full_grad(w, mean_grad);

  Rng rng(seed);
  Vector g(problem.dim());
  std::vector<double> samples(k_draws);
  for (uint64_t k = 0; k < k_draws; ++k) {
    g.setZero();
    for (int j = 0; j < batch; ++j) g += grads[rng.uniform_index(n)];
    g /= static_cast<double>(batch);
    samples[k] = (g - mean_grad).squaredNorm();
  }

  MinibatchIdentityReport report;
  report.exhaustive = false;
  report.tuples = k_draws;
  report.lhs = pairwise_mean(samples);
  report.rhs = detail::exact_identity_rhs(grads, mean_grad, batch);
  report.residual = std::fabs(report.lhs - report.rhs);
  KahanAccumulator var;
  for (double s : samples) var.add((s - report.lhs) * (s - report.lhs));
  report.lhs_stderr =
      std::sqrt(var.value() / (static_cast<double>(k_draws - 1) * static_cast<double>(k_draws)));
  return report;
}

}  // namespace sgdlab
