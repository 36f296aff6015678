#pragma once

#include "sgdlab/core.hpp"
#include "sgdlab/objective.hpp"
#include "sgdlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sgdlab {

enum class CensusMode { exact, monte_carlo };

struct CensusRow {
  double epsilon = 0.0;
  double p = 0.0;                  // fraction with |g|^2 <= epsilon
  uint64_t s_size = 0;             // count of that set
  std::optional<double> m_eps;     // conditional mean over the complement; absent iff p == 1
  bool condition_satisfied = false;  // 1 - p <= epsilon
  std::optional<double> p_stderr;  // monte-carlo only
};

/// Squared-norm statistics of the stochastic gradient at a reference point,
/// over a threshold grid. In exact mode (b = 1) every component gradient is
/// enumerated; in monte-carlo mode `draws` b-averaged gradients are sampled.
struct GradientCensus {
  Vector reference;
  int batch = 1;
  CensusMode mode = CensusMode::exact;
  uint64_t draws = 0;  // n in exact mode, K in monte-carlo mode
  std::vector<CensusRow> rows;
  double m_max = 0.0;
  double mean_sq_norm = 0.0;  // mean of |g|^2 over all draws

  std::string to_table() const {
    std::ostringstream out;
    out << "  batch=" << batch << " mode=" << (mode == CensusMode::exact ? "exact" : "monte-carlo")
        << " draws=" << draws << " M_max=" << format_double(m_max) << "\n";
    out << "  epsilon        p              |S|        M_eps          1-p<=eps\n";
    for (const auto& r : rows) {
      char line[160];
      std::snprintf(line, sizeof(line), "  %-12.6g   %-10.6f%%   %-8llu   %-12s   %s\n", r.epsilon,
                    100.0 * r.p, static_cast<unsigned long long>(r.s_size),
                    r.m_eps ? format_double(*r.m_eps).c_str() : "-",
                    r.condition_satisfied ? "yes" : "no");
      out << line;
    }
    return out.str();
  }
};

namespace detail {

inline GradientCensus census_from_samples(const std::vector<double>& sq_norms,
                                          const std::vector<double>& grid, CensusMode mode) {
  GradientCensus census;
  census.mode = mode;
  census.draws = sq_norms.size();
  census.m_max = sq_norms.empty() ? 0.0 : *std::max_element(sq_norms.begin(), sq_norms.end());
  census.mean_sq_norm = pairwise_mean(sq_norms);

  const double count = static_cast<double>(sq_norms.size());
  for (double eps : grid) {
    if (eps <= 0) throw PreconditionError("gradient_census: epsilon grid must be positive");
    CensusRow row;
    row.epsilon = eps;
    std::vector<double> big;
    big.reserve(sq_norms.size());
    uint64_t small = 0;
    for (double v : sq_norms) {
      if (v <= eps) ++small;
      else big.push_back(v);
    }
    row.s_size = small;
    row.p = static_cast<double>(small) / count;
    if (!big.empty()) row.m_eps = pairwise_mean(big);
    row.condition_satisfied = (1.0 - row.p) <= eps;
    if (mode == CensusMode::monte_carlo)
      row.p_stderr = std::sqrt(row.p * (1.0 - row.p) / count);
    census.rows.push_back(std::move(row));
  }
  return census;
}

}  // namespace detail

inline std::vector<double> default_epsilon_grid() { return {1e-6, 1e-5, 1e-4, 1e-3, 1e-2}; }

/// Exact census: p = |{i : |grad f_i(w_ref)|^2 <= eps}| / n per grid value,
/// M_eps the mean over the complement, M_max the overall max.
inline GradientCensus gradient_census_exact(const ComponentObjective& problem, const Vector& w_ref,
                                            const std::vector<double>& grid) {
  if (grid.empty()) throw PreconditionError("gradient_census: empty epsilon grid");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw PreconditionError("gradient_census: epsilon grid must be ascending");
  if (!w_ref.allFinite()) throw PreconditionError("gradient_census: non-finite reference point");

  std::vector<double> sq_norms(problem.n());
  Vector g(problem.dim());
  for (size_t i = 0; i < problem.n(); ++i) {
    problem.component_grad(i, w_ref, g);
    sq_norms[i] = g.squaredNorm();
  }
  GradientCensus census = detail::census_from_samples(sq_norms, grid, CensusMode::exact);
  census.reference = w_ref;
  census.batch = 1;
  return census;
}

/// Monte-carlo census over K i.i.d. b-averaged stochastic gradients.
inline GradientCensus gradient_census_monte_carlo(const ComponentObjective& problem,
                                                  const Vector& w_ref,
                                                  const std::vector<double>& grid, int batch,
                                                  uint64_t k_draws, uint64_t seed) {
  if (grid.empty()) throw PreconditionError("gradient_census: empty epsilon grid");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw PreconditionError("gradient_census: epsilon grid must be ascending");
  if (batch < 1) throw PreconditionError("gradient_census: batch must be >= 1");
  if (k_draws == 0) throw PreconditionError("gradient_census: K must be >= 1 in monte-carlo mode");
  if (!w_ref.allFinite()) throw PreconditionError("gradient_census: non-finite reference point");

  Rng rng(seed);
  std::vector<double> sq_norms(k_draws);
  Vector g(problem.dim()), gi(problem.dim());
  for (uint64_t k = 0; k < k_draws; ++k) {
    g.setZero();
    for (int j = 0; j < batch; ++j) {
      problem.component_grad(rng.uniform_index(problem.n()), w_ref, gi);
      g += gi;
    }
    g /= static_cast<double>(batch);
    sq_norms[k] = g.squaredNorm();
  }
  GradientCensus census = detail::census_from_samples(sq_norms, grid, CensusMode::monte_carlo);
  census.reference = w_ref;
  census.batch = batch;
  return census;
}

inline GradientCensus gradient_census(const ComponentObjective& problem, const Vector& w_ref,
                                      const std::vector<double>& grid, int batch, CensusMode mode,
                                      uint64_t k_draws = 10000, uint64_t seed = 0) {
  if (mode == CensusMode::exact) {
    if (batch != 1)
      throw PreconditionError("gradient_census: exact enumeration requires batch == 1");
    return gradient_census_exact(problem, w_ref, grid);
  }
  return gradient_census_monte_carlo(problem, w_ref, grid, batch, k_draws, seed);
}

/// Smallest grid epsilon with 1 - p_eps <= epsilon, if any.
inline std::optional<double> check_epsilon_condition(const GradientCensus& census) {
  for (const auto& row : census.rows)
    if (row.condition_satisfied) return row.epsilon;
  return std::nullopt;
}

}  // namespace sgdlab
