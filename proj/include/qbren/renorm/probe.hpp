#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qbren/error.hpp"
#include "qbren/numerics/linalg.hpp"
#include "qbren/numerics/quadrature.hpp"

namespace qbren::renorm {

// Model behind the probe: X = [1, inf), omega(k) = k, f(k) = k^alpha.
struct DivergenceProbe {
  double alpha = 0.0;
  double lambda = 0.0;
  std::vector<double> tau;
  std::vector<double> I_tau;  // int_1^tau t^{-2 alpha} N(t) dt
  double I0_est = 0.0;        // slope of I_tau against ln tau
  double I0_quad = 0.0;       // int_1^inf (p^{2a} - p^{-2a})(p^2 - 1)/(p^2 + 1)^2 dp
  std::vector<double> U_tau;  // int_0^tau u(t) dt, the Shale integrand
  double u_slope = 0.0;
  double u_I0_est = std::numeric_limits<double>::quiet_NaN();  // 4 |lambda| I u_slope, alpha > 0
  std::vector<double> head_T, head_value, head_bound;
  bool omega_inv_f_in_h = true;
  std::string status;
};

namespace detail {

inline numerics::QuadratureSpec inner_spec(double scale) {
  numerics::QuadratureSpec s;
  s.rel_tol = 1e-11;
  s.abs_tol = 1e-16;
  s.scale = scale;
  s.levels = 24;
  return s;
}

}  // namespace detail

// N(t) = int_1^inf k^{2a} (k^2 - t^2) / (k^2 + t^2)^2 dk
inline double probe_numerator(double alpha, double t) {
  auto g = [&](double x) {
    double k = 1.0 + x, k2 = k * k, t2 = t * t;
    return std::pow(k, 2 * alpha) * (k2 - t2) / ((k2 + t2) * (k2 + t2));
  };
  return numerics::integrate_halfline(g, detail::inner_spec(std::max(1.0, t))).value;
}

// c(t) = <f|omega^{-1} R_{-t^2}(omega^2) f> = int_1^inf k^{2a-1} / (k^2 + t^2) dk
inline double probe_pairing(double alpha, double t) {
  auto g = [&](double x) {
    double k = 1.0 + x;
    return std::pow(k, 2 * alpha - 1) / (k * k + t * t);
  };
  return numerics::integrate_halfline(g, detail::inner_spec(std::max(1.0, t))).value;
}

inline double probe_u(double alpha, double lambda, double t) {
  return probe_numerator(alpha, t) / (1.0 + 4.0 * std::abs(lambda) * t * t * probe_pairing(alpha, t));
}

// J(a) = int_a^inf p^{2a} (p^2 - 1) / (p^2 + 1)^2 dp, so that t^{-2a} N(t) = J(1/t) / t
inline double probe_tail(double alpha, double a) {
  auto g = [&](double x) {
    double p = a + x, p2 = p * p;
    return std::pow(p, 2 * alpha) * (p2 - 1) / ((p2 + 1) * (p2 + 1));
  };
  return numerics::integrate_halfline(g, detail::inner_spec(1.0)).value;
}

inline double probe_I0(double alpha) {
  auto g = [&](double x) {
    double p = 1.0 + x, p2 = p * p;
    return (std::pow(p, 2 * alpha) - std::pow(p, -2 * alpha)) * (p2 - 1) / ((p2 + 1) * (p2 + 1));
  };
  return numerics::integrate_halfline(g, detail::inner_spec(1.0)).value;
}

inline DivergenceProbe divergence_probe(double alpha, double lambda,
                                        std::vector<double> tau = {1e3, std::pow(10.0, 3.5), 1e4}) {
  if (!(alpha >= 0.0 && alpha < 0.5)) throw DomainError("probe needs 0 <= alpha < 1/2");
  if (!(lambda < 0.0)) throw DomainError("probe needs lambda < 0");
  if (tau.size() < 2) throw DomainError("probe needs at least two ladder points");
  for (std::size_t i = 0; i < tau.size(); ++i)
    if (!(tau[i] > 1.0) || (i > 0 && !(tau[i] > tau[i - 1]))) throw DomainError("tau ladder must increase from above 1");

  DivergenceProbe p;
  p.alpha = alpha;
  p.lambda = lambda;
  p.tau = tau;
  p.omega_inv_f_in_h = alpha < 0.5;
  numerics::QuadratureSpec outer;
  outer.rel_tol = 1e-9;

  auto unit_breaks = [](double a, double b) {
    std::vector<double> br;
    for (double s = std::ceil(a); s < b; s += 1.0) br.push_back(s);
    return br;
  };

  // I(tau) in s = ln t, cumulative along the ladder
  auto iota = [&](double s) { return probe_tail(alpha, std::exp(-s)); };
  // u in s = ln t for t >= 1
  auto ulog = [&](double s) {
    double t = std::exp(s);
    return probe_u(alpha, lambda, t) * t;
  };
  double s_prev = 0.0, acc_i = 0.0;
  double acc_u = numerics::integrate_interval([&](double t) { return probe_u(alpha, lambda, t); }, 0.0, 1.0, {},
                                              outer)
                     .value;
  for (double T : tau) {
    double s = std::log(T);
    acc_i += numerics::integrate_interval(iota, s_prev, s, unit_breaks(s_prev, s), outer).value;
    acc_u += numerics::integrate_interval(ulog, s_prev, s, unit_breaks(s_prev, s), outer).value;
    p.I_tau.push_back(acc_i);
    p.U_tau.push_back(acc_u);
    s_prev = s;
  }
  std::vector<double> lt;
  for (double T : tau) lt.push_back(std::log(T));
  p.I0_est = numerics::fit_slope(lt, p.I_tau);
  p.u_slope = numerics::fit_slope(lt, p.U_tau);
  if (alpha > 0.0) {
    double I = 0.5 * std::numbers::pi / std::sin(std::numbers::pi * alpha);
    p.u_I0_est = 4.0 * std::abs(lambda) * I * p.u_slope;
  }
  p.I0_quad = probe_I0(alpha);
  for (double T : {0.5, 1.0, 4.0}) {
    auto r = numerics::integrate_interval([&](double t) { return probe_u(alpha, lambda, t); }, 0.0, T, {}, outer);
    p.head_T.push_back(T);
    p.head_value.push_back(r.value);
    p.head_bound.push_back(T / (1.0 - 2.0 * alpha));
  }
  p.status = std::abs(p.I0_est) <= 1e-3 ? "bounded" : "divergent-log";
  return p;
}

// (8 |lambda| / pi) int_0^tau u: partial Shale trace of the probe model
inline double probe_shale_partial(double lambda, double u_integral) {
  return 8.0 * std::abs(lambda) / std::numbers::pi * u_integral;
}

}  // namespace qbren::renorm
