#pragma once

#include <cmath>

#include "qbren/model.hpp"
#include "qbren/rankone.hpp"

namespace qbren::renorm {

using numerics::cplx;
using numerics::CMatrix;
using numerics::CVector;
using numerics::Matrix;
using numerics::Vector;

// omega^2 + 4 lambda |omega^{1/2} f><omega^{1/2} f|
inline rankone::RankOneOp xi_squared_op(const model::DiscretizedModel& m, double alpha) {
  return {m.omega.cwiseAbs2(), m.omega.cwiseSqrt().cwiseProduct(m.fhat()), alpha};
}

inline CMatrix regular_resolvent(const model::DiscretizedModel& m, cplx z) {
  return rankone::resolvent_rank_one(xi_squared_op(m, 4.0 * m.lambda), z);
}

// rank-one scalar of the regular family, 4 lambda / (1 + 4 lambda <psi|R_z psi>)
inline cplx regular_scalar(const model::DiscretizedModel& m, cplx z) {
  Vector fh = m.fhat();
  cplx q = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) q += m.omega(i) * fh(i) * fh(i) / (m.omega(i) * m.omega(i) - z);
  cplx den = 1.0 + 4.0 * m.lambda * q;
  if (std::abs(den) < 1e-13) throw SingularPointError("regular resolvent denominator vanishes");
  return 4.0 * m.lambda / den;
}

// sum_i fhat_i^2 / (omega_i (omega_i^2 - z))
inline cplx renormalized_pairing(const model::DiscretizedModel& m, cplx z) {
  Vector fh = m.fhat();
  cplx s = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) s += fh(i) * fh(i) / (m.omega(i) * (m.omega(i) * m.omega(i) - z));
  return s;
}

// scalar in front of the rank-one term of the renormalized family
inline cplx renormalized_scalar(const model::DiscretizedModel& m, cplx z) {
  cplx den = 1.0 + 4.0 * m.lambda * z * renormalized_pairing(m, z);
  if (std::abs(den) < 1e-13) throw SingularPointError("renormalized resolvent denominator vanishes");
  return 4.0 * m.lambda / den;
}

inline CMatrix renormalized_resolvent(const model::DiscretizedModel& m, cplx z) {
  const Eigen::Index n = m.size();
  Vector psi = m.omega.cwiseSqrt().cwiseProduct(m.fhat());
  CVector r(n), v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cplx den = m.omega(i) * m.omega(i) - z;
    if (std::abs(den) == 0.0) throw SingularPointError("z on the spectrum of omega^2");
    r(i) = 1.0 / den;
    v(i) = r(i) * psi(i);
  }
  CMatrix out = r.asDiagonal();
  out -= renormalized_scalar(m, z) * v * v.transpose();
  return out;
}

// <f|omega^{-1} f>
inline double inverse_omega_norm(const model::DiscretizedModel& m) {
  double n = m.norm(0.5);
  return n * n;
}

// 1/lambda_n = 1/lambda - 4 <f_n|omega^{-1} f_n>
inline double renormalized_coupling(double lambda, double c) {
  if (lambda == 0.0) return 0.0;
  return 1.0 / (1.0 / lambda - 4.0 * c);
}

// alpha of omega^2 + alpha psi psi^T recovered from a family's rank-one
// scalar b at a real point z below the spectrum
inline double recovered_alpha(const model::DiscretizedModel& m, double b, double z) {
  Vector psi = m.omega.cwiseSqrt().cwiseProduct(m.fhat());
  double q = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) q += psi(i) * psi(i) / (m.omega(i) * m.omega(i) - z);
  return b / (1.0 - b * q);
}

inline rankone::ResolventFamily regular_family(const model::DiscretizedModel& m) {
  return {[m](cplx z) { return regular_resolvent(m, z); }};
}

inline rankone::ResolventFamily renormalized_family(const model::DiscretizedModel& m) {
  return {[m](cplx z) { return renormalized_resolvent(m, z); }};
}

}  // namespace qbren::renorm
