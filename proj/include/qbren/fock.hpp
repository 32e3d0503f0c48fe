#pragma once

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "qbren/bogoliubov.hpp"
#include "qbren/error.hpp"
#include "qbren/model.hpp"
#include "qbren/numerics/linalg.hpp"

namespace qbren::fock {

using numerics::CMatrix;
using numerics::CVector;
using numerics::Matrix;
using numerics::Vector;

inline constexpr std::size_t max_dimension = 5000;

inline std::size_t binomial(int n, int k) {
  long double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<std::size_t>(std::llround(r));
}

// occupation vectors with total <= nmax, lexicographic order
class FockBasis {
 public:
  FockBasis(int d, int nmax) : d_(d), nmax_(nmax) {
    if (d < 1 || nmax < 0) throw DimensionError("FockBasis: need d >= 1 and nmax >= 0");
    std::size_t dim = binomial(d + nmax, d);
    if (dim > max_dimension)
      throw DimensionError("FockBasis dimension " + std::to_string(dim) + " exceeds the cap " +
                           std::to_string(max_dimension));
    std::vector<int> cur(d, 0);
    enumerate(0, 0, cur);
    for (std::size_t i = 0; i < states_.size(); ++i) index_[key(states_[i])] = i;
  }

  int modes() const { return d_; }
  int nmax() const { return nmax_; }
  std::size_t size() const { return states_.size(); }
  const std::vector<int>& state(std::size_t i) const { return states_[i]; }
  int total(std::size_t i) const {
    int t = 0;
    for (int n : states_[i]) t += n;
    return t;
  }
  std::optional<std::size_t> find(const std::vector<int>& n) const {
    int t = 0;
    for (int x : n) {
      if (x < 0) return std::nullopt;
      t += x;
    }
    if (t > nmax_) return std::nullopt;
    auto it = index_.find(key(n));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  void enumerate(int pos, int used, std::vector<int>& cur) {
    if (pos == d_) {
      states_.push_back(cur);
      return;
    }
    for (int n = 0; n + used <= nmax_; ++n) {
      cur[pos] = n;
      enumerate(pos + 1, used + n, cur);
    }
    cur[pos] = 0;
  }
  std::uint64_t key(const std::vector<int>& n) const {
    std::uint64_t k = 0;
    for (int i = d_ - 1; i >= 0; --i) k = k * (nmax_ + 1) + n[i];
    return k;
  }

  int d_, nmax_;
  std::vector<std::vector<int>> states_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

template <class S>
struct FockOperator {
  Eigen::SparseMatrix<S> matrix;
  std::optional<int> change;  // net change of the particle number, empty if mixed

  FockOperator operator*(const FockOperator& o) const {
    std::optional<int> c;
    if (change && o.change) c = *change + *o.change;
    return {(matrix * o.matrix).pruned(), c};
  }
  FockOperator operator+(const FockOperator& o) const {
    std::optional<int> c;
    if (change && o.change && *change == *o.change) c = change;
    return {matrix + o.matrix, c};
  }
  FockOperator operator*(S s) const { return {matrix * s, change}; }
};

namespace detail {

template <class S>
S conj_if(S x) {
  if constexpr (std::is_same_v<S, std::complex<double>>)
    return std::conj(x);
  else
    return x;
}

}  // namespace detail

// a*(g) = sum_i g_i a*_i, states leaving the basis are dropped
template <class S>
FockOperator<S> creation_op(const FockBasis& b, const Eigen::Matrix<S, Eigen::Dynamic, 1>& g) {
  if (g.size() != b.modes()) throw DimensionError("creation_op: vector size must equal the mode count");
  std::vector<Eigen::Triplet<S>> trip;
  for (std::size_t j = 0; j < b.size(); ++j) {
    auto n = b.state(j);
    for (int i = 0; i < b.modes(); ++i) {
      if (g(i) == S(0)) continue;
      n[i] += 1;
      if (auto r = b.find(n)) trip.emplace_back(*r, j, g(i) * std::sqrt(double(n[i])));
      n[i] -= 1;
    }
  }
  Eigen::SparseMatrix<S> m(b.size(), b.size());
  m.setFromTriplets(trip.begin(), trip.end());
  return {m, 1};
}

// a(g) = sum_i conj(g_i) a_i
template <class S>
FockOperator<S> annihilation_op(const FockBasis& b, const Eigen::Matrix<S, Eigen::Dynamic, 1>& g) {
  if (g.size() != b.modes()) throw DimensionError("annihilation_op: vector size must equal the mode count");
  std::vector<Eigen::Triplet<S>> trip;
  for (std::size_t j = 0; j < b.size(); ++j) {
    auto n = b.state(j);
    for (int i = 0; i < b.modes(); ++i) {
      if (n[i] == 0 || g(i) == S(0)) continue;
      double amp = std::sqrt(double(n[i]));
      n[i] -= 1;
      trip.emplace_back(*b.find(n), j, detail::conj_if(g(i)) * amp);
      n[i] += 1;
    }
  }
  Eigen::SparseMatrix<S> m(b.size(), b.size());
  m.setFromTriplets(trip.begin(), trip.end());
  return {m, -1};
}

// dGamma(A) = sum_ij A_ij a*_i a_j
template <class S>
FockOperator<S> second_quantize(const FockBasis& b, const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>& a) {
  if (a.rows() != b.modes() || a.cols() != b.modes()) throw DimensionError("second_quantize: matrix size");
  std::vector<Eigen::Triplet<S>> trip;
  for (std::size_t col = 0; col < b.size(); ++col) {
    auto n = b.state(col);
    for (int j = 0; j < b.modes(); ++j) {
      if (n[j] == 0) continue;
      double lo = std::sqrt(double(n[j]));
      n[j] -= 1;
      for (int i = 0; i < b.modes(); ++i) {
        if (a(i, j) == S(0)) continue;
        n[i] += 1;
        trip.emplace_back(*b.find(n), col, a(i, j) * lo * std::sqrt(double(n[i])));
        n[i] -= 1;
      }
      n[j] += 1;
    }
  }
  Eigen::SparseMatrix<S> m(b.size(), b.size());
  m.setFromTriplets(trip.begin(), trip.end());
  return {m, 0};
}

template <class S>
FockOperator<S> number_op(const FockBasis& b) {
  return second_quantize<S>(b, Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>::Identity(b.modes(), b.modes()));
}

// :(a*(f) + a(f))^2: = a(f)^2 + a*(f)^2 + 2 a*(f) a(f)
template <class S>
FockOperator<S> normal_ordered_square(const FockBasis& b, const Eigen::Matrix<S, Eigen::Dynamic, 1>& f) {
  auto c = creation_op<S>(b, f);
  auto a = annihilation_op<S>(b, f);
  return a * a + c * c + (c * a) * S(2);
}

template <class S>
struct Hamiltonian {
  FockOperator<S> quadratic;       // dGamma(omega + 2 lambda |f><f|) + lambda (a*(f)^2 + a(f)^2)
  FockOperator<S> normal_ordered;  // dGamma(omega) + lambda :(a*(f) + a(f))^2:
};

template <class S>
Hamiltonian<S> build_hamiltonian(const FockBasis& b, const Vector& omega,
                                 const Eigen::Matrix<S, Eigen::Dynamic, 1>& f, double lambda) {
  using M = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  M w = omega.cast<S>().asDiagonal();
  M h = w + (2.0 * lambda) * f * f.adjoint();
  auto c = creation_op<S>(b, f);
  auto a = annihilation_op<S>(b, f);
  Hamiltonian<S> out{second_quantize<S>(b, h) + (c * c + a * a) * S(lambda),
                     second_quantize<S>(b, w) + normal_ordered_square<S>(b, f) * S(lambda)};
  return out;
}

template <class S>
auto dense_eig(const FockOperator<S>& op) {
  using M = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  M d = M(op.matrix);
  Eigen::SelfAdjointEigenSolver<M> es(d);
  if (es.info() != Eigen::Success) throw EigenError("Fock eigensolver did not converge", 0.0);
  return es;
}

enum class Status { pass, fail, inconclusive };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::pass:
      return "pass";
    case Status::fail:
      return "fail";
    case Status::inconclusive:
      return "inconclusive";
  }
  return "?";
}

struct SpectralComparison {
  std::vector<double> fock_levels, predicted_levels, gaps, reduced_levels;
  double max_gap = 0.0;
  double truncation_change = 0.0;  // max level change between nmax and nmax - 2
  double ground_energy = 0.0;
  Vector xi_eigenvalues;
  Status status = Status::inconclusive;
};

inline Vector real_modes(const model::DiscretizedModel& m) { return m.fhat(); }

inline std::vector<double> lowest(const Vector& v, int k) {
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end());
  if (static_cast<int>(out.size()) > k) out.resize(k);
  return out;
}

// lowest eigenvalues of the truncated Hamiltonian against E0 + sum n_i nu_i
inline SpectralComparison spectral_compare(const FockBasis& b, const model::DiscretizedModel& m, int levels,
                                           double tol = 1e-4) {
  if (m.size() != b.modes()) throw DimensionError("spectral_compare: model size must equal the mode count");
  if (b.nmax() < 2) throw DimensionError("spectral_compare needs nmax >= 2");
  Vector fh = m.fhat();
  SpectralComparison out;
  auto h = build_hamiltonian<double>(b, m.omega, fh, m.lambda);
  out.fock_levels = lowest(dense_eig(h.quadratic).eigenvalues(), levels);
  FockBasis small(b.modes(), b.nmax() - 2);
  auto hs = build_hamiltonian<double>(small, m.omega, fh, m.lambda);
  out.reduced_levels = lowest(dense_eig(hs.quadratic).eigenvalues(), levels);

  auto blocks = bogoliubov::build_blocks(m, bogoliubov::XiMode::direct, rankone::Method::eig);
  out.xi_eigenvalues = blocks.xi_spec.values;
  out.ground_energy = bogoliubov::ground_energy(blocks);
  std::vector<double> pred;
  for (std::size_t i = 0; i < b.size(); ++i) {
    double e = out.ground_energy;
    for (int j = 0; j < b.modes(); ++j) e += b.state(i)[j] * out.xi_eigenvalues(j);
    pred.push_back(e);
  }
  std::sort(pred.begin(), pred.end());
  pred.resize(out.fock_levels.size());
  out.predicted_levels = pred;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    out.gaps.push_back(std::abs(out.fock_levels[i] - pred[i]));
    out.max_gap = std::max(out.max_gap, out.gaps.back());
  }
  for (std::size_t i = 0; i < std::min(out.fock_levels.size(), out.reduced_levels.size()); ++i)
    out.truncation_change = std::max(out.truncation_change, std::abs(out.fock_levels[i] - out.reduced_levels[i]));
  if (out.truncation_change > tol)
    out.status = Status::inconclusive;
  else
    out.status = out.max_gap <= tol ? Status::pass : Status::fail;
  return out;
}

struct VacuumNumber {
  double fock = 0.0;   // <Psi_0|N Psi_0> in the truncated space
  double shale = 0.0;  // tr(V V^T)
  double truncation_change = 0.0;
};

inline double ground_number(const FockBasis& b, const model::DiscretizedModel& m) {
  Vector fh = m.fhat();
  auto h = build_hamiltonian<double>(b, m.omega, fh, m.lambda);
  auto es = dense_eig(h.quadratic);
  Vector g = es.eigenvectors().col(0);
  auto n = number_op<double>(b);
  return g.dot(n.matrix * g);
}

inline VacuumNumber vacuum_number_expectation(const FockBasis& b, const model::DiscretizedModel& m) {
  VacuumNumber out;
  out.fock = ground_number(b, m);
  if (b.nmax() >= 2) out.truncation_change = std::abs(out.fock - ground_number(FockBasis(b.modes(), b.nmax() - 2), m));
  auto blocks = bogoliubov::build_blocks(m, bogoliubov::XiMode::direct, rankone::Method::eig);
  out.shale = bogoliubov::shale_trace(blocks).direct;
  return out;
}

struct BoundTerms {
  double lhs = 0.0;        // ||:(a* + a)^2: Psi||
  double sqrt6_rhs = 0.0;  // sqrt(6) ||f||^2 (||N Psi|| + ||Psi||)
  double safe_rhs = 0.0;   // ||f||^2 (4 ||N Psi|| + 2 ||Psi||)
  bool components_ok = true;
};

// the three single-term bounds are checked in their sharp form
inline BoundTerms bound_terms(const FockBasis& b, const Vector& f, const Vector& psi) {
  auto c = creation_op<double>(b, f);
  auto a = annihilation_op<double>(b, f);
  auto n = number_op<double>(b);
  const double f2 = f.squaredNorm();
  Vector np = n.matrix * psi;
  BoundTerms t;
  Vector o = (a * a + c * c + (c * a) * 2.0).matrix * psi;
  t.lhs = o.norm();
  t.sqrt6_rhs = std::sqrt(6.0) * f2 * (np.norm() + psi.norm());
  t.safe_rhs = f2 * (4.0 * np.norm() + 2.0 * psi.norm());
  Vector nn1(psi.size()), n12(psi.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    double k = b.total(i);
    nn1(i) = std::sqrt(k * (k - 1)) * psi(i);
    n12(i) = std::sqrt((k + 1) * (k + 2)) * psi(i);
  }
  const double slack = 1e-12 * (1.0 + f2 * (np.norm() + psi.norm()));
  t.components_ok = (a * a).matrix.operator*(psi).norm() <= f2 * nn1.norm() + slack &&
                    (c * c).matrix.operator*(psi).norm() <= f2 * n12.norm() + slack &&
                    (c * a).matrix.operator*(psi).norm() <= f2 * np.norm() + slack;
  return t;
}

struct RelativeBoundReport {
  int trials = 0;
  int sqrt6_violations = 0;
  int safe_violations = 0;
  int component_violations = 0;
  double worst_sqrt6_ratio = 0.0;  // max lhs / sqrt6_rhs
};

// random states supported on total <= nmax - 2, so that no term is truncated
inline RelativeBoundReport relative_bound_check(const FockBasis& b, const Vector& f, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  RelativeBoundReport r;
  r.trials = trials;
  for (int t = 0; t < trials; ++t) {
    Vector psi = Vector::Zero(b.size());
    for (std::size_t i = 0; i < b.size(); ++i)
      if (b.total(i) <= b.nmax() - 2) psi(i) = gauss(rng);
    psi.normalize();
    auto bt = bound_terms(b, f, psi);
    r.worst_sqrt6_ratio = std::max(r.worst_sqrt6_ratio, bt.lhs / bt.sqrt6_rhs);
    if (bt.lhs > bt.sqrt6_rhs * (1 + 1e-12)) ++r.sqrt6_violations;
    if (bt.lhs > bt.safe_rhs * (1 + 1e-12)) ++r.safe_violations;
    if (!bt.components_ok) ++r.component_violations;
  }
  return r;
}

// max over guarded basis states of ||([a(g), a*(h)] - <g|h>) e||
template <class S>
double ccr_residual(const FockBasis& b, const Eigen::Matrix<S, Eigen::Dynamic, 1>& g,
                    const Eigen::Matrix<S, Eigen::Dynamic, 1>& h) {
  auto ag = annihilation_op<S>(b, g);
  auto ch = creation_op<S>(b, h);
  Eigen::SparseMatrix<S> comm = ag.matrix * ch.matrix - ch.matrix * ag.matrix;
  S ip = g.dot(h);
  double worst = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (b.total(j) > b.nmax() - 1) continue;
    Eigen::Matrix<S, Eigen::Dynamic, 1> col = Eigen::Matrix<S, Eigen::Dynamic, 1>(comm.col(j));
    col(j) -= ip;
    worst = std::max(worst, col.norm());
  }
  return worst;
}

// spectra of H(f) and H(|f|)
inline double gauge_equivalence(const FockBasis& b, const Vector& omega, const CVector& f, double lambda) {
  auto hc = build_hamiltonian<std::complex<double>>(b, omega, f, lambda);
  Vector fr = f.cwiseAbs();
  auto hr = build_hamiltonian<double>(b, omega, fr, lambda);
  Vector ec = dense_eig(hc.quadratic).eigenvalues();
  Vector er = dense_eig(hr.quadratic).eigenvalues();
  return (ec - er).cwiseAbs().maxCoeff();
}

}  // namespace qbren::fock
