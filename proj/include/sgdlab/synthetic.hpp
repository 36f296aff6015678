#pragma once

#include "sgdlab/core.hpp"
#include "sgdlab/dataset.hpp"
#include "sgdlab/rng.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace sgdlab {

/// Noise layout for the quartic recovery instance. Energies are relative to
/// the clean-signal energy sum((a_i^T w_hat)^2)^2 and are hit exactly by
/// rescaling the raw draws.
struct NoisePlan {
  size_t head_count = 0;      // leading components forming the "large" group
  double head_ratio = 0.0;    // noise energy of the head, relative to signal
  double tail_ratio = 0.0;    // noise energy of the remaining components

  static NoisePlan none() { return {0, 0.0, 0.0}; }
  /// All components small: 1% of the clean energy.
  static NoisePlan scenario_i() { return {0, 0.0, 0.01}; }
  /// First 40% of components large (25% of the clean energy), rest small.
  static NoisePlan scenario_ii(size_t n) { return {n * 2 / 5, 0.25, 0.01}; }
};

/// Signal-recovery instance: observations y_i = (a_i^T w_hat)^2 + e_i.
struct QuarticInstance {
  std::vector<Vector> a;
  Vector y;
  Vector y_clean;
  Vector noise;
  Vector w_hat;
  NoisePlan plan;

  size_t n() const { return a.size(); }
  int dim() const { return static_cast<int>(w_hat.size()); }
};

namespace detail {

inline void scale_noise_group(Vector& e, size_t begin, size_t end, double target_energy) {
  if (begin >= end) return;
  if (target_energy <= 0.0) {
    for (size_t i = begin; i < end; ++i) e[static_cast<Eigen::Index>(i)] = 0.0;
    return;
  }
  double raw = 0.0;
  for (size_t i = begin; i < end; ++i) {
    const double v = e[static_cast<Eigen::Index>(i)];
    raw += v * v;
  }
  if (raw == 0.0) throw PreconditionError("quartic noise scaling: zero raw noise energy");
  const double s = std::sqrt(target_energy / raw);
  for (size_t i = begin; i < end; ++i) e[static_cast<Eigen::Index>(i)] *= s;
}

}  // namespace detail

/// Draw a_i with i.i.d. standard normal entries, form y_i = (a_i^T w_hat)^2
/// + e_i, and rescale the noise groups so the requested energy ratios hold
/// exactly.
inline QuarticInstance generate_quartic(size_t n, int d, const Vector& w_hat,
                                        const NoisePlan& plan, uint64_t seed) {
  if (n == 0) throw PreconditionError("generate_quartic: n must be >= 1");
  if (d <= 0) throw PreconditionError("generate_quartic: d must be >= 1");
  if (w_hat.size() != d) throw PreconditionError("generate_quartic: w_hat has wrong length");
  if (w_hat.squaredNorm() == 0.0)
    throw PreconditionError("generate_quartic: w_hat must be nonzero (noise energy undefined)");
  if (plan.head_count > n) throw PreconditionError("generate_quartic: head_count exceeds n");
  if (plan.head_ratio < 0 || plan.tail_ratio < 0)
    throw PreconditionError("generate_quartic: negative noise ratio");

  QuarticInstance inst;
  inst.w_hat = w_hat;
  inst.plan = plan;
  inst.a.reserve(n);

  Rng rng(derive_seed(seed, 0));
  inst.y_clean.resize(static_cast<Eigen::Index>(n));
  for (size_t i = 0; i < n; ++i) {
    Vector ai(d);
    for (int k = 0; k < d; ++k) ai[k] = rng.gaussian();
    const double s = ai.dot(w_hat);
    inst.y_clean[static_cast<Eigen::Index>(i)] = s * s;
    inst.a.push_back(std::move(ai));
  }
  const double signal_energy = inst.y_clean.squaredNorm();
  if (signal_energy == 0.0)
    throw PreconditionError("generate_quartic: degenerate instance with zero signal energy");

  Rng noise_rng(derive_seed(seed, 1));
  inst.noise.resize(static_cast<Eigen::Index>(n));
  for (size_t i = 0; i < n; ++i) inst.noise[static_cast<Eigen::Index>(i)] = noise_rng.gaussian();
  detail::scale_noise_group(inst.noise, 0, plan.head_count, plan.head_ratio * signal_energy);
  detail::scale_noise_group(inst.noise, plan.head_count, n, plan.tail_ratio * signal_energy);

  inst.y = inst.y_clean + inst.noise;
  return inst;
}

struct LogisticSyntheticParams {
  size_t n = 0;
  int d = 0;
  /// Hard floor on the signed distance to the planted hyperplane; every
  /// un-flipped example satisfies y_i (x_i^T w_plant) >= margin.
  double margin = 1.0;
  /// Scale of the Gaussian cloud around the two margin-separated centers.
  double noise_std = 1.0;
  /// Fraction of labels flipped after placement (makes the set non-separable).
  double flip_fraction = 0.0;
  uint64_t seed = 0;
};

struct LogisticSynthetic {
  Dataset dataset;
  Vector w_plant;
};

/// Planted-hyperplane classification data: x_i = noise_std * z_perp +
/// y_i * (margin + noise_std * |g|) * u with z, g standard normal and
/// u = w_plant / |w_plant|.
inline LogisticSynthetic generate_synthetic_logistic(const LogisticSyntheticParams& p) {
  if (p.n == 0) throw PreconditionError("generate_synthetic_logistic: n must be >= 1");
  if (p.d <= 0) throw PreconditionError("generate_synthetic_logistic: d must be >= 1");
  if (p.margin < 0) throw PreconditionError("generate_synthetic_logistic: margin must be >= 0");
  if (p.noise_std < 0) throw PreconditionError("generate_synthetic_logistic: noise_std must be >= 0");
  if (p.flip_fraction < 0 || p.flip_fraction > 1)
    throw PreconditionError("generate_synthetic_logistic: flip_fraction must be in [0,1]");

  Rng rng(derive_seed(p.seed, 2));
  Vector u(p.d);
  for (int k = 0; k < p.d; ++k) u[k] = rng.gaussian();
  const double un = u.norm();
  u = (un > 0) ? Vector(u / un) : Vector(Vector::Unit(p.d, 0));

  LogisticSynthetic out;
  out.w_plant = u;
  out.dataset.dimension = p.d;
  out.dataset.examples.reserve(p.n);

  for (size_t i = 0; i < p.n; ++i) {
    const double y = rng.sign();
    Vector z(p.d);
    for (int k = 0; k < p.d; ++k) z[k] = rng.gaussian();
    const double z_along = z.dot(u);
    const double offset = p.margin + p.noise_std * std::fabs(rng.gaussian());
    Vector x = p.noise_std * (z - z_along * u) + (y * offset) * u;

    SparseExample ex;
    ex.label = y;
    ex.features.reserve(static_cast<size_t>(p.d));
    for (int k = 0; k < p.d; ++k)
      if (x[k] != 0.0) ex.features.emplace_back(k, x[k]);
    out.dataset.examples.push_back(std::move(ex));
  }

  if (p.flip_fraction > 0) {
    const size_t flips = static_cast<size_t>(p.flip_fraction * static_cast<double>(p.n));
    for (size_t k = 0; k < flips; ++k) {
      const size_t i = rng.uniform_index(p.n);
      out.dataset.examples[i].label = -out.dataset.examples[i].label;
    }
  }

  out.dataset.validate();
  return out;
}

}  // namespace sgdlab
