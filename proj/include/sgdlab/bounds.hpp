#pragma once

#include "sgdlab/core.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace sgdlab::bounds {

/// Inputs shared by the convergence-rate evaluators. m_eps is absent exactly
/// when p_eps = 1; every formula then takes the (1 - p) M product as 0 and
/// the (1 + M) factors as 1.
struct BoundInputs {
  double mu = 0.0;       // strong convexity (strongly convex regime only)
  double L = 0.0;        // smoothness
  double eta = 0.0;      // step size
  double epsilon = 0.0;  // census threshold
  double p_eps = 1.0;    // fraction with small stochastic gradient at w*
  std::optional<double> m_eps;
  double dist0_sq = 0.0;     // |w_0 - w*|^2
  double f0_gap = 0.0;       // F(w_0) - F* (nonconvex regime)
  double n_constant = 0.0;   // drift constant N (nonconvex regime)
};

struct Horizon {
  double iterations = 0.0;  // T
  double plateau = 0.0;     // guaranteed level once t >= T
};

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw PreconditionError(std::string("bounds: ") + what);
}

inline void check_common(const BoundInputs& in) {
  require(in.L > 0, "L must be positive");
  require(in.eta > 0, "eta must be positive");
  require(in.epsilon > 0, "epsilon must be positive");
  require(in.p_eps >= 0 && in.p_eps <= 1, "p_eps must lie in [0,1]");
  require(in.m_eps.has_value() || in.p_eps == 1.0, "M_eps required when p_eps < 1");
  if (in.m_eps) require(*in.m_eps > in.epsilon, "M_eps must exceed epsilon");
}

inline double residual_term(const BoundInputs& in) {
  // p_eps * eps + (1 - p_eps) * M_eps, with the product exactly 0 when p = 1.
  const double tail = (in.p_eps == 1.0) ? 0.0 : (1.0 - in.p_eps) * *in.m_eps;
  return in.p_eps * in.epsilon + tail;
}

inline double one_plus_m(const BoundInputs& in) { return 1.0 + in.m_eps.value_or(0.0); }

inline void check_condition(const BoundInputs& in) {
  require(1.0 - in.p_eps <= in.epsilon, "requires 1 - p_eps <= epsilon");
}

}  // namespace detail

/// E|w_t - w*|^2 bound for mu-strongly convex F with eta <= 1/L:
///   (1 - mu eta (1 - eta L))^t |w0 - w*|^2
///     + (2 eta / (mu (1 - eta L))) (p eps + (1-p) M).
inline double strongly_convex(const BoundInputs& in, double t) {
  detail::check_common(in);
  detail::require(in.mu > 0, "mu must be positive");
  detail::require(in.mu <= in.L, "mu must not exceed L");
  detail::require(in.eta <= 1.0 / in.L, "strongly convex bound needs eta <= 1/L");
  detail::require(t >= 0, "t must be >= 0");
  const double contraction = 1.0 - in.mu * in.eta * (1.0 - in.eta * in.L);
  return std::pow(contraction, t) * in.dist0_sq +
         2.0 * in.eta / (in.mu * (1.0 - in.eta * in.L)) * detail::residual_term(in);
}

/// Simplified strongly convex bound under 1 - p <= eps and eta <= 1/(2L):
///   (1 - mu eta)^t |w0 - w*|^2 + (2 eta / mu)(1 + M) eps.
inline double strongly_convex_simplified(const BoundInputs& in, double t) {
  detail::check_common(in);
  detail::require(in.mu > 0, "mu must be positive");
  detail::require(in.mu <= in.L, "mu must not exceed L");
  detail::require(in.eta <= 0.5 / in.L, "simplified strongly convex bound needs eta <= 1/(2L)");
  detail::check_condition(in);
  detail::require(t >= 0, "t must be >= 0");
  return std::pow(1.0 - in.mu * in.eta, t) * in.dist0_sq +
         2.0 * in.eta / in.mu * detail::one_plus_m(in) * in.epsilon;
}

/// T = (1/(mu eta)) log(mu |w0-w*|^2 / (2 eta (1+M) eps)), plateau
/// (4 eta / mu)(1 + M) eps. T is 0 when the start already sits inside.
inline Horizon strongly_convex_horizon(const BoundInputs& in) {
  detail::check_common(in);
  detail::require(in.mu > 0, "mu must be positive");
  detail::require(in.mu <= in.L, "mu must not exceed L");
  detail::require(in.eta <= 0.5 / in.L, "horizon needs eta <= 1/(2L)");
  detail::check_condition(in);
  const double level = 2.0 * in.eta / in.mu * detail::one_plus_m(in) * in.epsilon;
  Horizon h;
  h.plateau = 2.0 * level;
  const double arg = in.dist0_sq / level;
  h.iterations = arg > 1.0 ? std::log(arg) / (in.mu * in.eta) : 0.0;
  return h;
}

/// Average-suboptimality bound for convex components, eta < 1/L, t >= 1:
///   |w0 - w*|^2 / (2 eta (1 - eta L) t) + (eta/(1 - eta L)) (p eps + (1-p) M).
inline double convex(const BoundInputs& in, double t) {
  detail::check_common(in);
  detail::require(in.eta < 1.0 / in.L, "convex bound needs eta < 1/L");
  detail::require(t >= 1, "convex bound needs t >= 1");
  return in.dist0_sq / (2.0 * in.eta * (1.0 - in.eta * in.L) * t) +
         in.eta / (1.0 - in.eta * in.L) * detail::residual_term(in);
}

/// Simplified convex bound under 1 - p <= eps and eta <= 1/(2L):
///   |w0 - w*|^2 / (eta t) + 2 eta (1 + M) eps.
inline double convex_simplified(const BoundInputs& in, double t) {
  detail::check_common(in);
  detail::require(in.eta <= 0.5 / in.L, "simplified convex bound needs eta <= 1/(2L)");
  detail::check_condition(in);
  detail::require(t >= 1, "convex bound needs t >= 1");
  return in.dist0_sq / (in.eta * t) + 2.0 * in.eta * detail::one_plus_m(in) * in.epsilon;
}

/// T = |w0 - w*|^2 / (2 eta^2 (1+M) eps), plateau 4 eta (1+M) eps.
inline Horizon convex_horizon(const BoundInputs& in) {
  detail::check_common(in);
  detail::require(in.eta <= 0.5 / in.L, "horizon needs eta <= 1/(2L)");
  detail::check_condition(in);
  Horizon h;
  h.plateau = 4.0 * in.eta * detail::one_plus_m(in) * in.epsilon;
  h.iterations = in.dist0_sq / (2.0 * in.eta * in.eta * detail::one_plus_m(in) * in.epsilon);
  return h;
}

/// Average squared-gradient bound for L-smooth F under the drift assumption
/// with constant N, eta < 1/(LN):
///   (F(w0) - F*) / (eta (1 - L eta N)(t+1))
///     + (L eta / (1 - L eta N)) eps + (L eta M / (1 - L eta N))(1 - p).
inline double nonconvex(const BoundInputs& in, double t) {
  detail::check_common(in);
  detail::require(in.n_constant > 0, "N must be positive");
  detail::require(in.eta < 1.0 / (in.L * in.n_constant), "nonconvex bound needs eta < 1/(LN)");
  detail::require(t >= 0, "t must be >= 0");
  const double denom = 1.0 - in.L * in.eta * in.n_constant;
  const double tail = (in.p_eps == 1.0) ? 0.0 : (1.0 - in.p_eps) * *in.m_eps;
  return in.f0_gap / (in.eta * denom * (t + 1.0)) +
         in.L * in.eta / denom * in.epsilon + in.L * in.eta / denom * tail;
}

/// Simplified nonconvex bound under 1 - p <= eps and eta <= 1/(2LN):
///   2 (F(w0) - F*) / (eta (t+1)) + 2 L eta (1 + M) eps.
inline double nonconvex_simplified(const BoundInputs& in, double t) {
  detail::check_common(in);
  detail::require(in.n_constant > 0, "N must be positive");
  detail::require(in.eta <= 0.5 / (in.L * in.n_constant),
                  "simplified nonconvex bound needs eta <= 1/(2LN)");
  detail::check_condition(in);
  detail::require(t >= 0, "t must be >= 0");
  return 2.0 * in.f0_gap / (in.eta * (t + 1.0)) +
         2.0 * in.L * in.eta * detail::one_plus_m(in) * in.epsilon;
}

/// T = (F(w0) - F*) / (L eta^2 (1+M) eps), plateau 4 L eta (1+M) eps.
inline Horizon nonconvex_horizon(const BoundInputs& in) {
  detail::check_common(in);
  detail::require(in.n_constant > 0, "N must be positive");
  detail::require(in.eta <= 0.5 / (in.L * in.n_constant), "horizon needs eta <= 1/(2LN)");
  detail::check_condition(in);
  Horizon h;
  h.plateau = 4.0 * in.L * in.eta * detail::one_plus_m(in) * in.epsilon;
  h.iterations = in.f0_gap / (in.L * in.eta * in.eta * detail::one_plus_m(in) * in.epsilon);
  return h;
}

}  // namespace sgdlab::bounds
