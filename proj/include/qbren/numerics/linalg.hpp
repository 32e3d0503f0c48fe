#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "qbren/error.hpp"

namespace qbren::numerics {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using cplx = std::complex<double>;

// values ascending, vectors column-wise orthonormal
struct EigenDecomposition {
  Vector values;
  Matrix vectors;
};

inline double symmetry_defect(const Matrix& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

inline void require_symmetric(const Matrix& m, double rel = 1e-12) {
  if (m.rows() != m.cols()) throw DimensionError("matrix is not square");
  if (m.size() == 0) return;
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  double defect = symmetry_defect(m);
  if (defect > rel * scale)
    throw NotSymmetricError("matrix not symmetric, max |M - M^T| = " + std::to_string(defect));
}

inline EigenDecomposition eig_sym(const Matrix& m) {
  require_symmetric(m);
  Matrix s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success) {
    double res = (s * es.eigenvectors() - es.eigenvectors() * es.eigenvalues().asDiagonal()).norm();
    throw EigenError("symmetric eigensolver did not converge", res);
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

// Q diag(fn(mu)) Q^T
inline Matrix apply(const EigenDecomposition& e, const std::function<double(double)>& fn) {
  Vector v = e.values.unaryExpr(fn);
  return e.vectors * v.asDiagonal() * e.vectors.transpose();
}

inline Vector apply_diag(const EigenDecomposition& e, const std::function<double(double)>& fn) {
  // only the diagonal of Q diag(fn) Q^T, O(m^2)
  Vector v = e.values.unaryExpr(fn);
  return e.vectors.cwiseAbs2() * v;
}

inline double orthogonality_defect(const Matrix& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).norm();
}

// operator norm of a symmetric matrix by power iteration on M^2,
// falls back to a dense solve if the iteration stalls
inline double spectral_norm_sym(const Matrix& m, double tol = 1e-12, int max_iter = 5000) {
  const Eigen::Index n = m.rows();
  if (n == 0) return 0.0;
  if (m.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = 1.0 + 0.1 * std::sin(1.0 + i);
  x.normalize();
  double prev = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector y = m * (m * x);
    double r = x.dot(y);
    double ny = y.norm();
    if (ny == 0.0) break;
    x = y / ny;
    if (it > 3 && std::abs(r - prev) <= tol * std::abs(r)) return std::sqrt(std::max(r, 0.0));
    prev = r;
  }
  auto e = eig_sym(m);
  return std::max(std::abs(e.values(0)), std::abs(e.values(n - 1)));
}

// least-squares slope of y against x
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw DomainError("fit_slope needs two or more points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw DomainError("fit_slope with degenerate abscissae");
  return sxy / sxx;
}

}  // namespace qbren::numerics
