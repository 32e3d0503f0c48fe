#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "qbren/model.hpp"
#include "qbren/numerics/linalg.hpp"
#include "qbren/numerics/quadrature.hpp"
#include "qbren/rankone.hpp"
#include "qbren/renorm/resolvent.hpp"

namespace qbren::bogoliubov {

using numerics::EigenDecomposition;
using numerics::Matrix;
using numerics::Vector;
using rankone::Method;

enum class XiMode { direct, regular, renormalized };

inline std::string to_string(XiMode m) {
  switch (m) {
    case XiMode::direct:
      return "direct";
    case XiMode::regular:
      return "regular";
    case XiMode::renormalized:
      return "renormalized";
  }
  return "?";
}

struct Xi {
  Matrix xi;
  EigenDecomposition spec;  // eigenpairs of xi
  double alpha = 0.0;       // xi^2 = omega^2 + alpha |omega^{1/2} f><omega^{1/2} f|
};

inline void require_real_nonnegative(const model::DiscretizedModel& m) {
  if (!m.real_form_factor()) throw DomainError("form factor must be real; apply gauge_reduce first");
  if (m.size() > 0 && m.f.real().minCoeff() < 0.0) throw DomainError("form factor must be nonnegative");
}

// coupling of the squared operator for each construction route
inline double xi_alpha(const model::DiscretizedModel& m, XiMode mode) {
  switch (mode) {
    case XiMode::direct:
      return 4.0 * m.lambda;
    case XiMode::regular:
      return renorm::recovered_alpha(m, std::real(renorm::regular_scalar(m, -1.0)), -1.0);
    case XiMode::renormalized:
      if (m.lambda > 0.0) throw DomainError("renormalized construction needs lambda <= 0");
      return renorm::recovered_alpha(m, std::real(renorm::renormalized_scalar(m, -1.0)), -1.0);
  }
  return 0.0;
}

inline void check_contour(const model::DiscretizedModel& m, double alpha) {
  // 1 + alpha <f|omega R_{-t^2}(omega^2) f> is smallest at t = 0 when alpha < 0
  if (alpha >= 0.0) return;
  double c = renorm::inverse_omega_norm(m);
  double den = 1.0 + alpha * c;
  if (!(den > 0.0))
    throw NotPositiveError("denominator 1 + 4 lambda <f|omega R f> = " + std::to_string(den) +
                               " is not positive at contour node t = 0",
                           den);
}

// xi = omega + (2/pi) int t^2 b(-t^2) v v^T dt, v = R_{-t^2}(omega^2) omega^{1/2} f,
// with b the rank-one scalar of the chosen resolvent family
inline Matrix xi_quadrature(const model::DiscretizedModel& m, XiMode mode) {
  Vector fh = m.fhat();
  Vector psi = m.omega.cwiseSqrt().cwiseProduct(fh);
  Vector w2 = m.omega.cwiseAbs2();
  const double lam = m.lambda;
  auto b = [&](double s) {  // s = t^2
    if (mode == XiMode::renormalized) {
      double acc = 0;
      for (Eigen::Index i = 0; i < m.size(); ++i) acc += fh(i) * fh(i) / (m.omega(i) * (w2(i) + s));
      return 4.0 * lam / (1.0 - 4.0 * lam * s * acc);
    }
    double acc = 0;
    for (Eigen::Index i = 0; i < m.size(); ++i) acc += psi(i) * psi(i) / (w2(i) + s);
    return 4.0 * lam / (1.0 + 4.0 * lam * acc);
  };
  numerics::QuadratureSpec spec;
  spec.scale = std::exp(m.omega.array().log().mean());
  auto g = [&](double t) -> Matrix {
    double s = t * t;
    Vector v = psi.array() / (w2.array() + s);
    return (s * b(s) * v) * v.transpose();
  };
  Matrix out = m.omega.asDiagonal();
  out += (2.0 / std::numbers::pi) * numerics::integrate_halfline(g, spec).value;
  return out;
}

inline Xi build_xi(const model::DiscretizedModel& m, XiMode mode, Method method = Method::secular) {
  require_real_nonnegative(m);
  if (mode == XiMode::renormalized && m.lambda > 0.0)
    throw DomainError("renormalized construction needs lambda <= 0");
  Xi out;
  out.alpha = mode == XiMode::direct ? 4.0 * m.lambda : xi_alpha(m, mode);
  if (mode != XiMode::renormalized) check_contour(m, out.alpha);
  auto op = renorm::xi_squared_op(m, out.alpha);
  if (method == Method::quadrature) {
    out.xi = mode == XiMode::direct ? rankone::power_half(op, Method::quadrature) : xi_quadrature(m, mode);
    out.spec = numerics::eig_sym(out.xi);
    return out;
  }
  rankone::require_positive(op);
  EigenDecomposition sq = method == Method::eig ? numerics::eig_sym(op.dense()) : rankone::spectral(op);
  if (!(sq.values(0) > 0.0)) throw NotPositiveError("xi^2 not positive", sq.values(0));
  out.spec = {sq.values.cwiseSqrt(), sq.vectors};
  out.xi = numerics::apply(out.spec, [](double x) { return x; });
  return out;
}

struct BogoliubovBlocks {
  XiMode mode = XiMode::direct;
  Vector omega, fhat;
  double lambda_eff = 0.0;  // coupling that the blocks diagonalize
  Matrix h, k, xi, U, V;
  EigenDecomposition xi_spec;
};

inline BogoliubovBlocks build_blocks(const model::DiscretizedModel& m, XiMode mode, Method method = Method::secular) {
  Xi x = build_xi(m, mode, method);
  BogoliubovBlocks b;
  b.mode = mode;
  b.omega = m.omega;
  b.fhat = m.fhat();
  b.lambda_eff = x.alpha / 4.0;
  b.k = 2.0 * b.lambda_eff * b.fhat * b.fhat.transpose();
  b.h = b.k;
  b.h.diagonal() += m.omega;
  b.xi = x.xi;
  b.xi_spec = x.spec;
  Matrix xh, xmh;  // xi^{1/2}, xi^{-1/2}
  if (method == Method::quadrature) {
    auto op = renorm::xi_squared_op(m, x.alpha);
    xh = rankone::power_quarter(op, Method::quadrature);
    xmh = rankone::power_neg_quarter(op, Method::quadrature);
  } else {
    xh = numerics::apply(x.spec, [](double v) { return std::sqrt(v); });
    xmh = numerics::apply(x.spec, [](double v) { return 1.0 / std::sqrt(v); });
  }
  Vector sw = m.omega.cwiseSqrt();
  Vector isw = sw.cwiseInverse();
  Matrix a = sw.asDiagonal() * xmh;
  Matrix c = isw.asDiagonal() * xh;
  b.U = 0.5 * (a + c);
  b.V = 0.5 * (a - c);
  return b;
}

inline Matrix block_matrix(const Matrix& p, const Matrix& q, const Matrix& r, const Matrix& s) {
  Matrix out(p.rows() + r.rows(), p.cols() + q.cols());
  out << p, q, r, s;
  return out;
}

struct BlockPair {
  Matrix A;  // [[h, k], [k, h]]
  Matrix V;  // transpose of [[U, V], [V, U]]
  Matrix S;  // diag(1, -1)
};

inline BlockPair block_pair(const BogoliubovBlocks& b) {
  const Eigen::Index n = b.omega.size();
  BlockPair p;
  p.A = block_matrix(b.h, b.k, b.k, b.h);
  p.V = block_matrix(b.U, b.V, b.V, b.U).transpose();
  Matrix I = Matrix::Identity(n, n), Z = Matrix::Zero(n, n);
  p.S = block_matrix(I, Z, Z, -I);
  return p;
}

// ||V A V^T - diag(xi, xi)|| / ||A||, Frobenius
inline double diagonalization_residual(const BogoliubovBlocks& b) {
  auto p = block_pair(b);
  Matrix z = Matrix::Zero(b.xi.rows(), b.xi.cols());
  Matrix target = block_matrix(b.xi, z, z, b.xi);
  return (p.V * p.A * p.V.transpose() - target).norm() / p.A.norm();
}

inline double symplectic_residual(const BogoliubovBlocks& b) {
  auto p = block_pair(b);
  return (p.V * p.S * p.V.transpose() - p.S).norm();
}

struct ShaleTrace {
  double direct = 0.0;    // tr(V V^T)
  double identity = 0.0;  // (1/4) tr(w^{1/2} xi^{-1} w^{1/2} - 2 + w^{-1/2} xi w^{-1/2})
  double bound = std::numeric_limits<double>::quiet_NaN();  // (lambda/2) ||omega^{-1/2} f||^2 for lambda >= 0
};

inline ShaleTrace shale_trace(const BogoliubovBlocks& b) {
  ShaleTrace s;
  s.direct = b.V.squaredNorm();
  Vector xi_inv_diag = numerics::apply_diag(b.xi_spec, [](double v) { return 1.0 / v; });
  Vector xi_diag = numerics::apply_diag(b.xi_spec, [](double v) { return v; });
  double acc = 0.0;
  for (Eigen::Index i = 0; i < b.omega.size(); ++i)
    acc += b.omega(i) * xi_inv_diag(i) + xi_diag(i) / b.omega(i) - 2.0;
  s.identity = 0.25 * acc;
  if (b.lambda_eff >= 0.0) {
    double n = b.fhat.cwiseQuotient(b.omega.cwiseSqrt()).squaredNorm();
    s.bound = 0.5 * b.lambda_eff * n;
  }
  return s;
}

// (1/2) tr(xi - h)
inline double ground_energy(const BogoliubovBlocks& b) {
  Vector mu = b.xi_spec.values;  // ascending
  Vector w = b.omega;
  std::sort(w.data(), w.data() + w.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) acc += (mu(i) - w(i));
  return 0.5 * acc - b.lambda_eff * b.fhat.squaredNorm();
}

struct TraceIdentity {
  double lhs = 0.0;       // tr(xi omega^{-1} xi - omega)
  double rhs = 0.0;       // tr(omega^{-1/2} xi^2 omega^{-1/2} - omega)
  double analytic = 0.0;  // 4 lambda ||f||^2
};

inline TraceIdentity pivotal_trace_identity(const BogoliubovBlocks& b) {
  TraceIdentity t;
  const Eigen::Index n = b.omega.size();
  Matrix x2 = b.xi * b.xi;
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) row += b.xi(i, j) * b.xi(j, i) / b.omega(j);
    t.lhs += row - b.omega(i);
    t.rhs += x2(i, i) / b.omega(i) - b.omega(i);
  }
  t.analytic = 4.0 * b.lambda_eff * b.fhat.squaredNorm();
  return t;
}

// integrand of the half-line representation of tr(xi - h)
inline double formal_trace_integrand(const model::DiscretizedModel& m, double t) {
  Vector fh = m.fhat();
  double s = t * t;
  double nrm = 0.0, c = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    double r = 1.0 / (m.omega(i) * m.omega(i) + s);
    nrm += m.omega(i) * fh(i) * fh(i) * r * r;
    c += m.omega(i) * fh(i) * fh(i) * r;
  }
  return -32.0 * m.lambda * m.lambda / std::numbers::pi * s * nrm * c / (1.0 + 4.0 * m.lambda * c);
}

struct FormalTrace {
  double value = 0.0;  // full half-line integral on the grid
  double error = 0.0;
  std::vector<double> tau, partial;
  double exponent = 0.0;  // growth exponent of |partial| in tau
  bool divergent = false;
};

inline FormalTrace formal_trace(const model::DiscretizedModel& m, std::vector<double> tau = {1e2, 1e3, 1e4},
                                double tol = 0.05) {
  require_real_nonnegative(m);
  check_contour(m, 4.0 * m.lambda);
  FormalTrace out;
  out.tau = tau;
  auto g = [&](double t) { return formal_trace_integrand(m, t); };
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-12;
  spec.scale = std::exp(m.omega.array().log().mean());
  if (m.lambda == 0.0 || m.fhat().squaredNorm() == 0.0) {
    out.partial.assign(tau.size(), 0.0);
    return out;
  }
  auto full = numerics::integrate_halfline(g, spec);
  out.value = full.value;
  out.error = full.error;
  for (double T : tau) {
    auto br = numerics::geometric_breaks(1e-3, T, 2);
    br.push_back(1e-3);
    out.partial.push_back(numerics::integrate_interval(g, 0.0, T, br, spec).value);
  }
  std::vector<double> mag;
  for (double p : out.partial) mag.push_back(std::abs(p));
  out.exponent = model::fit_exponent(tau, mag);
  out.divergent = out.exponent > tol;
  return out;
}

}  // namespace qbren::bogoliubov
