#pragma once

#include "sgdlab/logistic.hpp"
#include "sgdlab/objective.hpp"
#include "sgdlab/quartic.hpp"
#include "sgdlab/rng.hpp"
#include "sgdlab/synthetic.hpp"

#include <memory>

namespace testhelpers {

using sgdlab::Dataset;
using sgdlab::SparseExample;
using sgdlab::Vector;

/// The 3-sample hand dataset behind the frozen high-precision constants
/// (see tests/oracles/logistic_reference.py).
inline Dataset hand_dataset() {
  Dataset data;
  data.dimension = 2;
  data.examples = {
      SparseExample{1.0, {{0, 1.0}, {1, 2.0}}},
      SparseExample{-1.0, {{0, -0.5}, {1, 0.25}}},
      SparseExample{1.0, {{1, 1.5}}},
  };
  return data;
}

inline constexpr double kHandLambda = 0.1;

/// Central finite differences with step h, independent of component_grad.
inline Vector finite_difference_component_grad(const sgdlab::ComponentObjective& problem, size_t i,
                                               const Vector& w, double h = 1e-6) {
  Vector g(w.size());
  Vector probe = w;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    probe[k] = w[k] + h;
    const double up = problem.component_value(i, probe);
    probe[k] = w[k] - h;
    const double down = problem.component_value(i, probe);
    probe[k] = w[k];
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

inline double grad_relative_error(const Vector& analytic, const Vector& numeric) {
  return (analytic - numeric).norm() / std::max(1.0, analytic.norm());
}

inline Vector random_vector(sgdlab::Rng& rng, int dim, double scale = 1.0) {
  Vector w(dim);
  for (int k = 0; k < dim; ++k) w[k] = scale * rng.gaussian();
  return w;
}

/// f_i(w) = 0.5 |w - c_i|^2; closed forms for every quantity under test.
class QuadraticEnsemble : public sgdlab::ComponentObjective {
 public:
  explicit QuadraticEnsemble(std::vector<Vector> centers) : centers_(std::move(centers)) {
    mean_center_ = Vector::Zero(centers_.front().size());
    for (const auto& c : centers_) mean_center_ += c;
    mean_center_ /= static_cast<double>(centers_.size());
  }

  static QuadraticEnsemble scalar(std::vector<double> centers) {
    std::vector<Vector> cs;
    for (double c : centers) {
      Vector v(1);
      v << c;
      cs.push_back(v);
    }
    return QuadraticEnsemble(std::move(cs));
  }

  size_t n() const override { return centers_.size(); }
  int dim() const override { return static_cast<int>(centers_.front().size()); }
  const Vector& mean_center() const { return mean_center_; }

  using ComponentObjective::component_grad;

  double component_value(size_t i, const Vector& w) const override {
    check_index(i);
    return 0.5 * (w - centers_[i]).squaredNorm();
  }

  void component_grad(size_t i, const Vector& w, Vector& out) const override {
    check_index(i);
    out = w - centers_[i];
  }

  sgdlab::SmoothnessInfo smoothness() const override { return {1.0, false}; }
  std::optional<double> strong_convexity() const override { return 1.0; }

 private:
  std::vector<Vector> centers_;
  Vector mean_center_;
};

}  // namespace testhelpers
