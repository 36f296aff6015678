#pragma once

#include "sgdlab/objective.hpp"
#include "sgdlab/rng.hpp"
#include "sgdlab/synthetic.hpp"

#include <cmath>
#include <memory>
#include <utility>

namespace sgdlab {

struct ProbeConfig {
  Vector center;          // empty -> defaults to w_hat
  double radius = 0.0;    // <= 0 -> defaults to 2 * (|center| + |w_hat|) + 1
  size_t pairs = 2000;
  uint64_t seed = 12345;
};

/// Quartic recovery loss f_i(w) = (y_i - (a_i^T w)^2)^2. Nonconvex; no
/// global Lipschitz gradient constant exists, so smoothness() reports a
/// seeded probe-cloud estimate over a ball and flags it as such. Step sizes
/// must be derived from that estimate.
class QuarticProblem : public ComponentObjective {
 public:
  explicit QuarticProblem(QuarticInstance inst, ProbeConfig probe = {})
      : inst_(std::make_shared<const QuarticInstance>(std::move(inst))), probe_(std::move(probe)) {
    if (probe_.center.size() == 0) probe_.center = inst_->w_hat;
    if (probe_.radius <= 0) probe_.radius = 2.0 * (probe_.center.norm() + inst_->w_hat.norm()) + 1.0;
    smoothness_ = estimate_local_smoothness(probe_);
  }

  size_t n() const override { return inst_->n(); }
  int dim() const override { return inst_->dim(); }
  const QuarticInstance& instance() const { return *inst_; }
  const ProbeConfig& probe() const { return probe_; }

  using ComponentObjective::component_grad;

  double component_value(size_t i, const Vector& w) const override {
    check_index(i);
    const double s = inst_->a[i].dot(w);
    const double r = inst_->y[static_cast<Eigen::Index>(i)] - s * s;
    return r * r;
  }

  void component_grad(size_t i, const Vector& w, Vector& out) const override {
    check_index(i);
    const double s = inst_->a[i].dot(w);
    const double r = inst_->y[static_cast<Eigen::Index>(i)] - s * s;
    out = (-4.0 * r * s) * inst_->a[i];
  }

  SmoothnessInfo smoothness() const override { return {smoothness_, true}; }

  /// The planted signal; an exact stationary point in the zero-noise case
  /// and the natural census reference otherwise (as is its negative).
  std::optional<Vector> known_stationary_point() const override { return inst_->w_hat; }

  /// Max gradient-difference ratio |grad F(u) - grad F(v)| / |u - v| over a
  /// seeded cloud of probe pairs in the given ball. Alternates long pairs
  /// (independent draws) with tight pairs around a draw, which pick up the
  /// local curvature peaks that long segments average away.
  double estimate_local_smoothness(const ProbeConfig& probe) const {
    Rng rng(probe.seed);
    Vector u(dim()), v(dim()), gu(dim()), gv(dim());
    const double tight_step = 1e-4 * probe.radius;
    double best = 0.0;
    for (size_t k = 0; k < probe.pairs; ++k) {
      sample_in_ball(rng, probe, u);
      if (k % 2 == 0) {
        sample_in_ball(rng, probe, v);
      } else {
        double nrm2 = 0.0;
        for (int j = 0; j < dim(); ++j) {
          v[j] = rng.gaussian();
          nrm2 += v[j] * v[j];
        }
        v = u + (tight_step / std::sqrt(std::max(nrm2, 1e-300))) * v;
      }
      const double dist = (u - v).norm();
      if (dist < 1e-12) continue;
      full_grad(u, gu);
      full_grad(v, gv);
      best = std::max(best, (gu - gv).norm() / dist);
    }
    return best;
  }

  void sample_in_ball(Rng& rng, const ProbeConfig& probe, Vector& out) const {
    // Gaussian direction, radius ~ r * U^(1/d): uniform over the ball.
    double nrm2 = 0.0;
    for (int k = 0; k < dim(); ++k) {
      out[k] = rng.gaussian();
      nrm2 += out[k] * out[k];
    }
    const double nrm = std::sqrt(nrm2);
    const double r = probe.radius * std::pow(rng.uniform01_open_low(), 1.0 / dim());
    if (nrm > 0) out = probe.center + (r / nrm) * out;
    else out = probe.center;
  }

 private:
  std::shared_ptr<const QuarticInstance> inst_;
  ProbeConfig probe_;
  double smoothness_ = 0.0;
};

}  // namespace sgdlab
