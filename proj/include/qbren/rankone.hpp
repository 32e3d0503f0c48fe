#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <vector>

#include "qbren/error.hpp"
#include "qbren/numerics/dpr1.hpp"
#include "qbren/numerics/linalg.hpp"
#include "qbren/numerics/quadrature.hpp"

namespace qbren::rankone {

using numerics::cplx;
using numerics::CMatrix;
using numerics::CVector;
using numerics::EigenDecomposition;
using numerics::Matrix;
using numerics::QuadratureSpec;
using numerics::Vector;

// T = diag(a) + alpha psi psi^T with a > 0
struct RankOneOp {
  Vector a;
  Vector psi;
  double alpha = 0.0;

  Eigen::Index size() const { return a.size(); }

  Matrix dense() const {
    Matrix t = a.asDiagonal();
    t += alpha * psi * psi.transpose();
    return t;
  }
};

enum class Method { quadrature, eig, secular };

inline void check_shape(const RankOneOp& op) {
  if (op.psi.size() != op.a.size()) throw DimensionError("rank-one operator: size mismatch");
  if (op.size() > 0 && !(op.a.minCoeff() > 0.0)) throw DomainError("rank-one operator: diagonal must be positive");
}

// eigenpairs through the secular equation, in the operator's own ordering
inline EigenDecomposition spectral(const RankOneOp& op) {
  check_shape(op);
  const Eigen::Index m = op.size();
  std::vector<Eigen::Index> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](auto i, auto j) { return op.a(i) < op.a(j); });
  Vector d(m), p(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    d(i) = op.a(perm[i]);
    p(i) = op.psi(perm[i]);
  }
  auto e = numerics::dpr1_eig(d, p, op.alpha);
  Matrix q(m, m);
  for (Eigen::Index i = 0; i < m; ++i) q.row(perm[i]) = e.vectors.row(i);
  return {e.values, q};
}

inline double min_eigenvalue(const RankOneOp& op) {
  if (op.size() == 0) return 0.0;
  if (op.alpha >= 0.0) {
    // cheap lower bound suffices when the perturbation is positive
    return op.a.minCoeff();
  }
  return spectral(op).values(0);
}

inline void require_positive(const RankOneOp& op) {
  check_shape(op);
  double mu = min_eigenvalue(op);
  if (!(mu > 0.0))
    throw NotPositiveError("rank-one operator is not positive definite, min eigenvalue " + std::to_string(mu), mu);
}

// (T - z)^{-1} = R - alpha/(1 + alpha <psi|R psi>) R psi psi^T R
inline CMatrix resolvent_rank_one(const RankOneOp& op, cplx z) {
  check_shape(op);
  const Eigen::Index m = op.size();
  CVector r(m), v(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    cplx den = op.a(i) - z;
    if (std::abs(den) == 0.0) throw SingularPointError("z lies on the spectrum of the diagonal part");
    r(i) = 1.0 / den;
    v(i) = r(i) * op.psi(i);
  }
  cplx q = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) q += op.psi(i) * v(i);
  cplx den = 1.0 + op.alpha * q;
  if (std::abs(den) < 1e-13) throw SingularPointError("z is an eigenvalue of the rank-one perturbation");
  CMatrix out = r.asDiagonal();
  out -= (op.alpha / den) * v * v.transpose();
  return out;
}

enum class Power { half, neg_half, quarter, neg_quarter };

inline double exponent_of(Power p) {
  switch (p) {
    case Power::half:
      return 0.5;
    case Power::neg_half:
      return -0.5;
    case Power::quarter:
      return 0.25;
    case Power::neg_quarter:
      return -0.25;
  }
  return 0.0;
}

namespace detail {

inline double geometric_mean(const Vector& a) { return std::exp(a.array().log().mean()); }

// kernel variable s(t) with the half-line weight, for each power:
//   A^{1/2}   : s = t^2,     weight  t^2, prefactor  2/pi
//   A^{-1/2}  : s = t^2,     weight  1,   prefactor -2/pi
//   A^{1/4}   : s = t^4,     weight  t^4, prefactor  2 sqrt2/pi
//   A^{-1/4}  : s = t^{4/3}, weight  1,   prefactor -2 sqrt2/(3 pi)
struct Kernel {
  double power;
  double prefactor;
  bool weighted;
  double scale_exponent;
};

inline Kernel kernel(Power p) {
  const double pi = std::numbers::pi, r2 = std::numbers::sqrt2;
  switch (p) {
    case Power::half:
      return {2.0, 2.0 / pi, true, 0.5};
    case Power::neg_half:
      return {2.0, -2.0 / pi, false, 0.5};
    case Power::quarter:
      return {4.0, 2.0 * r2 / pi, true, 0.25};
    case Power::neg_quarter:
      return {4.0 / 3.0, -2.0 * r2 / (3.0 * pi), false, 0.75};
  }
  return {};
}

}  // namespace detail

inline Matrix power(const RankOneOp& op, Power p, Method method = Method::quadrature,
                    QuadratureSpec spec = {}) {
  require_positive(op);
  const double e = exponent_of(p);
  if (method == Method::eig) {
    auto d = numerics::eig_sym(op.dense());
    if (!(d.values(0) > 0.0)) throw NotPositiveError("dense spectrum not positive", d.values(0));
    return numerics::apply(d, [e](double x) { return std::pow(x, e); });
  }
  if (method == Method::secular) {
    auto d = spectral(op);
    return numerics::apply(d, [e](double x) { return std::pow(x, e); });
  }
  const auto k = detail::kernel(p);
  const Eigen::Index m = op.size();
  Matrix base = op.a.array().pow(e).matrix().asDiagonal();
  if (op.alpha == 0.0 || m == 0) return base;
  spec.scale = std::pow(detail::geometric_mean(op.a), 1.0 / k.power);
  auto g = [&](double t) -> Matrix {
    double s = std::pow(t, k.power);
    Vector v = op.psi.array() / (op.a.array() + s);
    double den = 1.0 + op.alpha * op.psi.dot(v);
    double c = (k.weighted ? s : 1.0) / den;
    return (c * v) * v.transpose();
  };
  auto res = numerics::integrate_halfline(g, spec);
  return base + (k.prefactor * op.alpha) * res.value;
}

inline Matrix power_half(const RankOneOp& op, Method m = Method::quadrature, QuadratureSpec s = {}) {
  return power(op, Power::half, m, s);
}
inline Matrix power_neg_half(const RankOneOp& op, Method m = Method::quadrature, QuadratureSpec s = {}) {
  return power(op, Power::neg_half, m, s);
}
inline Matrix power_quarter(const RankOneOp& op, Method m = Method::quadrature, QuadratureSpec s = {}) {
  return power(op, Power::quarter, m, s);
}
inline Matrix power_neg_quarter(const RankOneOp& op, Method m = Method::quadrature, QuadratureSpec s = {}) {
  return power(op, Power::neg_quarter, m, s);
}

// tr(T^{1/2} - A^{1/2})
inline double trace_sqrt_shift(const RankOneOp& op, Method method = Method::quadrature,
                               QuadratureSpec spec = {.rel_tol = 1e-12}) {
  require_positive(op);
  if (op.alpha == 0.0 || op.size() == 0) return 0.0;
  if (method != Method::quadrature) {
    Vector mu = method == Method::eig ? numerics::eig_sym(op.dense()).values : spectral(op).values;
    // pair sorted roots with sorted diagonal to keep the sum well conditioned
    Vector a = op.a;
    std::sort(a.data(), a.data() + a.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) acc += (mu(i) - a(i)) / (std::sqrt(mu(i)) + std::sqrt(a(i)));
    return acc;
  }
  spec.scale = std::sqrt(detail::geometric_mean(op.a));
  auto g = [&](double t) {
    double s = t * t;
    Vector v = op.psi.array() / (op.a.array() + s);
    double den = 1.0 + op.alpha * op.psi.dot(v);
    return s * v.squaredNorm() / den;
  };
  return (2.0 * op.alpha / std::numbers::pi) * numerics::integrate_halfline(g, spec).value;
}

struct ResolventFamily {
  std::function<CMatrix(cplx)> eval;
};

struct FamilyCheck {
  double conjugation_residual = 0.0;     // max ||R(z)^* - R(conj z)|| / ||R(z)||
  double resolvent_identity_residual = 0.0;  // max ||R(z+w) - R(w) - z R(z+w) R(w)|| / ||R(w)||
  double min_singular_value = 0.0;       // smallest over the sample of sigma_min(R(z))
  std::vector<double> identity_residuals;
  bool kernel_trivial = false;
};

inline FamilyCheck resolvent_family_check(const ResolventFamily& fam, const std::vector<cplx>& zs,
                                          const std::vector<cplx>& ws) {
  FamilyCheck out;
  out.min_singular_value = std::numeric_limits<double>::infinity();
  for (cplx z : zs) {
    CMatrix r = fam.eval(z);
    CMatrix rc = fam.eval(std::conj(z));
    double nr = std::max(r.norm(), std::numeric_limits<double>::min());
    out.conjugation_residual = std::max(out.conjugation_residual, (r.adjoint() - rc).norm() / nr);
    Eigen::JacobiSVD<CMatrix> svd(r);
    out.min_singular_value = std::min(out.min_singular_value, svd.singularValues().minCoeff());
  }
  for (cplx z : zs)
    for (cplx w : ws) {
      CMatrix rzw = fam.eval(z + w);
      CMatrix rw = fam.eval(w);
      CMatrix d = rzw - rw - z * rzw * rw;
      double res = d.norm() / std::max(rw.norm(), std::numeric_limits<double>::min());
      out.identity_residuals.push_back(res);
      out.resolvent_identity_residual = std::max(out.resolvent_identity_residual, res);
    }
  out.kernel_trivial = out.min_singular_value > 1e-12;
  return out;
}

}  // namespace qbren::rankone
