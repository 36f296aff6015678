#pragma once

#include "sgdlab/core.hpp"

#include <optional>
#include <string>

namespace sgdlab {

struct SmoothnessInfo {
  double value = 0.0;
  /// True when L is a probe-based local estimate rather than a proven bound.
  bool is_estimate = false;
};

/// Finite-sum objective F(w) = (1/n) sum_i f_i(w). Implementations are
/// immutable after construction; component evaluations are pure and safe to
/// call from many threads.
class ComponentObjective {
 public:
  virtual ~ComponentObjective() = default;

  virtual size_t n() const = 0;
  virtual int dim() const = 0;

  virtual double component_value(size_t i, const Vector& w) const = 0;
  virtual void component_grad(size_t i, const Vector& w, Vector& out) const = 0;

  Vector component_grad(size_t i, const Vector& w) const {
    Vector g(dim());
    component_grad(i, w, g);
    return g;
  }

  /// Mean of component values; single pass, compensated summation.
  virtual double full_value(const Vector& w) const {
    check_index(0);
    KahanAccumulator acc;
    for (size_t i = 0; i < n(); ++i) acc.add(component_value(i, w));
    return acc.value() / static_cast<double>(n());
  }

  /// Mean of component gradients; single pass, compensated summation.
  virtual void full_grad(const Vector& w, Vector& out) const {
    KahanVectorAccumulator acc(dim());
    Vector g(dim());
    for (size_t i = 0; i < n(); ++i) {
      component_grad(i, w, g);
      acc.add(g);
    }
    out = acc.value() / static_cast<double>(n());
  }

  Vector full_grad(const Vector& w) const {
    Vector g(dim());
    full_grad(w, g);
    return g;
  }

  virtual SmoothnessInfo smoothness() const = 0;
  virtual std::optional<double> strong_convexity() const { return std::nullopt; }

  /// A known stationary point, when the problem construction provides one.
  virtual std::optional<Vector> known_stationary_point() const { return std::nullopt; }

 protected:
  void check_index(size_t i) const {
    if (i >= n()) throw PreconditionError("component index " + std::to_string(i) + " out of range");
  }
};

}  // namespace sgdlab
