#include "sgdlab/census.hpp"
#include "sgdlab/logistic.hpp"
#include "sgdlab/quartic.hpp"
#include "sgdlab/rt.hpp"
#include "sgdlab/synthetic.hpp"
#include "sgdlab/variance.hpp"

#include <catch2/catch.hpp>

#include <cmath>

#include "helpers.hpp"

using namespace sgdlab;
using namespace testhelpers;

TEST_CASE("census at an exact interpolation point", "[diagnostics]") {
  Vector w_hat(2);
  w_hat << 1.0, 0.5;
  QuarticProblem problem(generate_quartic(50, 2, w_hat, NoisePlan::none(), 7));
  const GradientCensus census =
      gradient_census(problem, w_hat, default_epsilon_grid(), 1, CensusMode::exact);
  for (const auto& row : census.rows) {
    CHECK(row.p == 1.0);
    CHECK(row.s_size == 50);
    CHECK_FALSE(row.m_eps.has_value());
    CHECK(row.condition_satisfied);
  }
  CHECK(census.m_max == 0.0);
}

TEST_CASE("census on a 3-component hand problem", "[diagnostics]") {
  // Centers chosen so |grad f_i(0)|^2 = {0.5, 2, 4}.
  const auto problem =
      QuadraticEnsemble::scalar({std::sqrt(0.5), std::sqrt(2.0), 2.0});
  const GradientCensus census =
      gradient_census(problem, Vector::Zero(1), {1.0}, 1, CensusMode::exact);
  REQUIRE(census.rows.size() == 1);
  CHECK(census.rows[0].p == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(census.rows[0].s_size == 1);
  REQUIRE(census.rows[0].m_eps.has_value());
  CHECK(*census.rows[0].m_eps == Approx(3.0).epsilon(1e-14));
  CHECK(census.m_max == Approx(4.0).epsilon(1e-14));
  CHECK(census.rows[0].condition_satisfied);  // 1 - 1/3 <= 1
}

TEST_CASE("census invariants on a realistic instance", "[diagnostics]") {
  const auto gen = generate_synthetic_logistic(
      {.n = 300, .d = 8, .margin = 2.0, .noise_std = 0.5, .seed = 19});
  LogisticProblem problem(gen.dataset, 0.05);
  Rng rng(6);
  const Vector w_ref = random_vector(rng, problem.dim(), 0.3);
  const GradientCensus census =
      gradient_census(problem, w_ref, default_epsilon_grid(), 1, CensusMode::exact);

  double prev_p = 0.0;
  for (const auto& row : census.rows) {
    CHECK(row.p >= prev_p);  // grid ascending -> p non-decreasing
    prev_p = row.p;
    CHECK(row.p == static_cast<double>(row.s_size) / static_cast<double>(problem.n()));
    if (row.m_eps) {
      CHECK(*row.m_eps > row.epsilon);
      CHECK(*row.m_eps <= census.m_max);
    } else {
      CHECK(row.p == 1.0);
    }
  }

  // Total-mean split: p * mean_small + (1 - p) * M_eps == mean of all.
  std::vector<double> sq(problem.n());
  for (size_t i = 0; i < problem.n(); ++i)
    sq[i] = problem.component_grad(i, w_ref).squaredNorm();
  for (const auto& row : census.rows) {
    std::vector<double> small;
    for (double v : sq)
      if (v <= row.epsilon) small.push_back(v);
    const double mean_small = small.empty() ? 0.0 : pairwise_mean(small);
    const double recombined =
        row.p * mean_small + (1.0 - row.p) * row.m_eps.value_or(0.0);
    CHECK(recombined == Approx(census.mean_sq_norm).epsilon(1e-12));
  }
}

TEST_CASE("monte-carlo census approximates the exact one at b=1", "[diagnostics]") {
  const auto gen = generate_synthetic_logistic({.n = 50, .d = 4, .margin = 1.0, .seed = 23});
  LogisticProblem problem(gen.dataset, 0.1);
  Rng rng(91);
  const Vector w_ref = random_vector(rng, problem.dim(), 0.2);
  const std::vector<double> grid = {1e-3, 1e-2, 1e-1, 1.0};

  const GradientCensus exact = gradient_census(problem, w_ref, grid, 1, CensusMode::exact);
  const GradientCensus mc =
      gradient_census(problem, w_ref, grid, 1, CensusMode::monte_carlo, 20000, 5);
  CHECK(mc.draws == 20000);
  for (size_t k = 0; k < grid.size(); ++k) {
    REQUIRE(mc.rows[k].p_stderr.has_value());
    const double slack = 4.0 * *mc.rows[k].p_stderr + 1e-3;
    CHECK(std::fabs(mc.rows[k].p - exact.rows[k].p) <= slack);
  }
}

TEST_CASE("monte-carlo census mean matches the variance identity", "[diagnostics]") {
  // E|g_b|^2 = |grad F|^2 + (E|grad f|^2 - |grad F|^2) / b ties the census
  // to the minibatch identity through an independent route.
  const auto gen = generate_synthetic_logistic({.n = 60, .d = 5, .margin = 1.0, .seed = 27});
  LogisticProblem problem(gen.dataset, 0.1);
  Rng rng(14);
  const Vector w_ref = random_vector(rng, problem.dim(), 0.4);
  const double full_sq = problem.full_grad(w_ref).squaredNorm();

  std::vector<double> sq(problem.n());
  for (size_t i = 0; i < problem.n(); ++i)
    sq[i] = problem.component_grad(i, w_ref).squaredNorm();
  const double component_mean = pairwise_mean(sq);

  for (int b : {2, 5}) {
    const GradientCensus census =
        gradient_census(problem, w_ref, {1.0}, b, CensusMode::monte_carlo, 40000, 11);
    const double predicted = full_sq + (component_mean - full_sq) / b;
    CHECK(census.mean_sq_norm == Approx(predicted).epsilon(0.05));
  }
}

TEST_CASE("census argument validation", "[diagnostics]") {
  const auto problem = QuadraticEnsemble::scalar({1.0});
  const Vector zero = Vector::Zero(1);
  CHECK_THROWS_AS(gradient_census(problem, zero, {}, 1, CensusMode::exact), PreconditionError);
  CHECK_THROWS_AS(gradient_census(problem, zero, {1e-2, 1e-3}, 1, CensusMode::exact),
                  PreconditionError);  // descending grid
  CHECK_THROWS_AS(gradient_census(problem, zero, {1e-3}, 2, CensusMode::exact),
                  PreconditionError);  // exact mode needs b=1
  CHECK_THROWS_AS(gradient_census(problem, zero, {1e-3}, 1, CensusMode::monte_carlo, 0),
                  PreconditionError);  // K = 0
}

TEST_CASE("epsilon condition picks the smallest qualifying grid entry", "[diagnostics]") {
  GradientCensus census;
  census.rows = {{1e-6, 1.0, 10, std::nullopt, true},
                 {1e-5, 1.0, 10, std::nullopt, true}};
  CHECK(check_epsilon_condition(census) == 1e-6);

  GradientCensus none;
  none.rows = {{0.1, 0.5, 5, 2.0, false}};
  CHECK_FALSE(check_epsilon_condition(none).has_value());

  GradientCensus mixed;
  mixed.rows = {{1e-4, 0.9, 9, 2e-4, false}, {1e-2, 0.995, 10, 2e-2, true}};
  CHECK(check_epsilon_condition(mixed) == 1e-2);
}

TEST_CASE("minibatch identity collapses algebraically at b=1", "[diagnostics]") {
  LogisticProblem problem(hand_dataset(), kHandLambda);
  Rng rng(3);
  const Vector w = random_vector(rng, problem.dim());
  const auto report = verify_minibatch_identity_exhaustive(problem, w, 1);
  CHECK(report.tuples == 3);
  CHECK(report.residual <= 1e-14);
}

TEST_CASE("minibatch identity holds exhaustively on a 5-sample problem", "[diagnostics]") {
  const auto gen = generate_synthetic_logistic({.n = 5, .d = 3, .margin = 1.0, .seed = 41});
  LogisticProblem problem(gen.dataset, 0.1);
  Rng rng(8);
  const Vector w = random_vector(rng, problem.dim());
  const auto report = verify_minibatch_identity_exhaustive(problem, w, 3);
  CHECK(report.exhaustive);
  CHECK(report.tuples == 125);
  CHECK(report.residual <= 1e-12);
}

TEST_CASE("minibatch identity is zero when all gradients coincide", "[diagnostics]") {
  // Identical centers: every component gradient equals the full gradient.
  const auto problem = QuadraticEnsemble::scalar({2.0, 2.0, 2.0});
  Vector w(1);
  w << -1.0;
  const auto report = verify_minibatch_identity_exhaustive(problem, w, 2);
  CHECK(report.lhs == 0.0);
  CHECK(report.rhs == 0.0);
}

TEST_CASE("exhaustive mode refuses oversized enumerations", "[diagnostics]") {
  const auto gen = generate_synthetic_logistic({.n = 100, .d = 2, .margin = 1.0, .seed = 2});
  LogisticProblem problem(gen.dataset, 0.1);
  CHECK_THROWS_AS(verify_minibatch_identity_exhaustive(problem, Vector::Zero(2), 4, 10000000),
                  PreconditionError);
}

TEST_CASE("sampled mode brackets the exact right-hand side", "[diagnostics]") {
  const auto gen = generate_synthetic_logistic({.n = 40, .d = 4, .margin = 1.0, .seed = 13});
  LogisticProblem problem(gen.dataset, 0.1);
  Rng rng(4);
  const Vector w = random_vector(rng, problem.dim());
  const auto report = verify_minibatch_identity_sampled(problem, w, 4, 50000, 7);
  REQUIRE(report.lhs_stderr.has_value());
  CHECK_FALSE(report.exhaustive);
  CHECK(std::fabs(report.lhs - report.rhs) <= 5.0 * *report.lhs_stderr);
}

TEST_CASE("r_t equals one exactly on the quadratic ensemble", "[diagnostics]") {
  const auto problem = QuadraticEnsemble::scalar({1.0, 2.0, 3.0, 6.0});
  const Vector w_star = problem.mean_center();
  std::vector<Vector> iterates;
  for (int k = 0; k < 25; ++k) {
    Vector w(1);
    w << w_star[0] + 5.0 * std::pow(0.8, k);
    iterates.push_back(w);
  }
  const RtEstimate est = rt_trace(problem, iterates, w_star);
  CHECK_FALSE(est.degenerate);
  for (double r : est.rt) CHECK(r == Approx(1.0).epsilon(1e-12));
  CHECK(est.n_hat == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("r_t on a stationary sequence reports zero with the degenerate flag", "[diagnostics]") {
  const auto problem = QuadraticEnsemble::scalar({1.0, 2.0, 3.0, 6.0});
  const Vector w_star = problem.mean_center();
  const std::vector<Vector> iterates(10, w_star);
  const RtEstimate est = rt_trace(problem, iterates, w_star);
  CHECK(est.degenerate);
  for (double r : est.rt) CHECK(r == 0.0);
  CHECK(est.n_hat == 0.0);
}

TEST_CASE("r_t rejects an empty sequence", "[diagnostics]") {
  const auto problem = QuadraticEnsemble::scalar({1.0});
  CHECK_THROWS_AS(rt_trace(problem, std::vector<Vector>{}, Vector::Zero(1)), PreconditionError);
}
