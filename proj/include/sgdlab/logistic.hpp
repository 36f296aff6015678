#pragma once

#include "sgdlab/dataset.hpp"
#include "sgdlab/objective.hpp"

#include <cmath>
#include <memory>
#include <utility>

namespace sgdlab {

/// log(1 + exp(z)) without overflow.
inline double log1pexp(double z) {
  if (z > 0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

/// 1 / (1 + exp(-z)) without overflow.
inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// l2-regularized logistic regression:
///   f_i(w) = log(1 + exp(-y_i x_i^T w)) + (lambda/2) |w|^2
/// Per-component smoothness L = (1/4) max_i |x_i|^2 + lambda, mu = lambda.
class LogisticProblem : public ComponentObjective {
 public:
  /// lambda < 0 selects the default 1/n.
  explicit LogisticProblem(std::shared_ptr<const Dataset> data, double lambda = -1.0)
      : data_(std::move(data)) {
    data_->validate();
    lambda_ = lambda < 0 ? 1.0 / static_cast<double>(data_->n()) : lambda;
    smoothness_ = 0.25 * data_->max_squared_norm() + lambda_;
  }

  explicit LogisticProblem(Dataset data, double lambda = -1.0)
      : LogisticProblem(std::make_shared<const Dataset>(std::move(data)), lambda) {}

  size_t n() const override { return data_->n(); }
  int dim() const override { return data_->dimension; }
  double lambda() const { return lambda_; }
  const Dataset& dataset() const { return *data_; }

  using ComponentObjective::component_grad;

  double component_value(size_t i, const Vector& w) const override {
    check_index(i);
    const auto& ex = data_->examples[i];
    const double margin = ex.label * ex.dot(w);
    return log1pexp(-margin) + 0.5 * lambda_ * w.squaredNorm();
  }

  void component_grad(size_t i, const Vector& w, Vector& out) const override {
    check_index(i);
    const auto& ex = data_->examples[i];
    const double margin = ex.label * ex.dot(w);
    out = lambda_ * w;
    ex.add_scaled_to(-ex.label * sigmoid(-margin), out);
  }

  SmoothnessInfo smoothness() const override { return {smoothness_, false}; }
  std::optional<double> strong_convexity() const override { return lambda_; }

 private:
  std::shared_ptr<const Dataset> data_;
  double lambda_ = 0.0;
  double smoothness_ = 0.0;
};

}  // namespace sgdlab
