#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "qbren/numerics/linalg.hpp"

namespace qbren::numerics {

namespace detail {

// eigenpairs of diag(d) + z z^T, d strictly ascending, all z_j != 0.
// Roots are kept as (pole index, offset) so that differences mu_i - d_j
// never suffer cancellation; the vectors use the Gu-Eisenstat recomputed z.
inline EigenDecomposition secular_plus(const Vector& d, const Vector& z) {
  const Eigen::Index n = d.size();
  const double eps = std::numeric_limits<double>::epsilon();
  const double z2 = z.squaredNorm();
  Vector zz = z.cwiseAbs2();
  std::vector<Eigen::Index> origin(n);
  Vector delta(n);

  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index o;
    double sigma, s_hi;
    if (i < n - 1) {
      double gap = d(i + 1) - d(i);
      double g_mid = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) g_mid += zz(j) / ((d(j) - d(i)) - 0.5 * gap);
      if (g_mid >= 0.0) {
        o = i;
        sigma = 1.0;
      } else {
        o = i + 1;
        sigma = -1.0;
      }
      s_hi = 0.5 * gap;
    } else {
      o = n - 1;
      sigma = 1.0;
      s_hi = z2;
    }
    auto h = [&](double s) {
      double g = 1.0;
      double dl = sigma * s;
      for (Eigen::Index j = 0; j < n; ++j) g += zz(j) / ((d(j) - d(o)) - dl);
      return sigma * g;
    };
    double lo = 0.0, hi = s_hi;
    for (int it = 0; it < 4000; ++it) {
      double mid;
      if (lo == 0.0)
        mid = hi * 1e-6;
      else if (hi > 4.0 * lo)
        mid = std::sqrt(lo * hi);
      else
        mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) break;
      if (h(mid) < 0.0)
        lo = mid;
      else
        hi = mid;
      if (hi - lo <= 2.0 * eps * hi) break;
    }
    origin[i] = o;
    delta(i) = sigma * (lo == 0.0 ? hi : 0.5 * (lo + hi));
  }

  auto diff = [&](Eigen::Index i, Eigen::Index j) {  // mu_i - d_j
    return (d(origin[i]) - d(j)) + delta(i);
  };

  Vector zh(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double p = diff(n - 1, j);
    for (Eigen::Index i = 0; i < j; ++i) p *= diff(i, j) / (d(i) - d(j));
    for (Eigen::Index i = j; i < n - 1; ++i) p *= diff(i, j) / (d(i + 1) - d(j));
    zh(j) = std::sqrt(std::max(p, 0.0)) * (z(j) < 0 ? -1.0 : 1.0);
  }

  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = d(origin[i]) + delta(i);
    for (Eigen::Index j = 0; j < n; ++j) out.vectors(j, i) = -zh(j) / diff(i, j);
    out.vectors.col(i).normalize();
  }
  return out;
}

}  // namespace detail

// Eigenpairs of diag(d) + alpha psi psi^T with d ascending.
// Components with negligible coupling are deflated exactly; clustered
// poles fall back to the dense solver.
inline EigenDecomposition dpr1_eig(const Vector& d, const Vector& psi, double alpha) {
  const Eigen::Index m = d.size();
  if (psi.size() != m) throw DimensionError("dpr1_eig: size mismatch");
  for (Eigen::Index i = 1; i < m; ++i)
    if (d(i) < d(i - 1)) throw DomainError("dpr1_eig: d must be ascending");
  if (!d.allFinite() || !psi.allFinite() || !std::isfinite(alpha))
    throw DomainError("dpr1_eig: non-finite input");

  auto dense = [&]() {
    Matrix t = d.asDiagonal();
    t += alpha * psi * psi.transpose();
    return eig_sym(t);
  };

  EigenDecomposition out{d, Matrix::Identity(m, m)};
  if (m == 0 || alpha == 0.0) return out;
  Vector z = std::sqrt(std::abs(alpha)) * psi;
  const double zn = z.norm();
  if (zn == 0.0) return out;

  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < m; ++j) {
    double scale = std::max(std::abs(d(j)), std::numeric_limits<double>::min());
    if (z(j) != 0.0 && std::abs(z(j)) * zn > 1e-16 * scale) active.push_back(j);
  }
  const Eigen::Index k = static_cast<Eigen::Index>(active.size());
  if (k == 0) return out;

  const double span = d(m - 1) - d(0);
  for (Eigen::Index a = 1; a < k; ++a)
    if (d(active[a]) - d(active[a - 1]) <= 1e-12 * span) return dense();

  Vector da(k), za(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    da(a) = d(active[a]);
    za(a) = z(active[a]);
  }
  EigenDecomposition sub;
  if (alpha > 0.0) {
    sub = detail::secular_plus(da, za);
  } else {
    // d - z z^T = -((-d) + z z^T), solved on the reversed order
    Vector dr = -da.reverse();
    Vector zr = za.reverse();
    auto r = detail::secular_plus(dr, zr);
    sub.values = -r.values.reverse();
    sub.vectors = r.vectors.reverse();
  }

  std::vector<double> vals;
  std::vector<Vector> vecs;
  std::vector<bool> is_active(m, false);
  for (auto j : active) is_active[j] = true;
  for (Eigen::Index j = 0; j < m; ++j)
    if (!is_active[j]) {
      vals.push_back(d(j));
      vecs.push_back(Vector::Unit(m, j));
    }
  for (Eigen::Index a = 0; a < k; ++a) {
    Vector v = Vector::Zero(m);
    for (Eigen::Index b = 0; b < k; ++b) v(active[b]) = sub.vectors(b, a);
    vals.push_back(sub.values(a));
    vecs.push_back(v);
  }
  std::vector<std::size_t> idx(vals.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto x, auto y) { return vals[x] < vals[y]; });
  for (Eigen::Index i = 0; i < m; ++i) {
    out.values(i) = vals[idx[i]];
    out.vectors.col(i) = vecs[idx[i]];
  }
  return out;
}

}  // namespace qbren::numerics
