#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qbren/fock.hpp"

using namespace qbren;
using fock::FockBasis;
using numerics::CVector;
using numerics::Matrix;
using numerics::Vector;

namespace {

model::DiscretizedModel modes(const std::vector<double>& omega, const std::vector<double>& f, double lambda) {
  model::DiscretizedModel m;
  const Eigen::Index d = omega.size();
  m.k = Vector::LinSpaced(d, 1.0, double(d));
  m.w = Vector::Ones(d);
  m.omega = Eigen::Map<const Vector>(omega.data(), d);
  m.f = Eigen::Map<const Vector>(f.data(), d).cast<std::complex<double>>();
  m.lambda = lambda;
  return m;
}

Vector unit(int d, int i) { return Vector::Unit(d, i); }

Matrix dense(const fock::FockOperator<double>& op) { return Matrix(op.matrix); }

}  // namespace

TEST(Basis, DimensionAndIndexMaps) {
  FockBasis b(3, 4);
  EXPECT_EQ(b.size(), 35u);  // C(7, 3)
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(*b.find(b.state(i)), i);
  EXPECT_EQ(b.state(0), std::vector<int>({0, 0, 0}));
  for (std::size_t i = 1; i < b.size(); ++i) EXPECT_LT(b.state(i - 1), b.state(i));
  EXPECT_FALSE(b.find({5, 0, 0}).has_value());
  EXPECT_THROW(FockBasis(8, 12), DimensionError);
}

TEST(Ladder, CreationOnNumberState) {
  FockBasis b(1, 5);
  auto c = dense(fock::creation_op<double>(b, unit(1, 0)));
  EXPECT_NEAR(c(*b.find({3}), *b.find({2})), std::sqrt(3.0), 1e-15);
  for (int n = 0; n < 5; ++n) EXPECT_NEAR(c(*b.find({n + 1}), *b.find({n})), std::sqrt(n + 1.0), 1e-15);
}

TEST(Ladder, AnnihilationKillsVacuum) {
  FockBasis b(2, 4);
  Vector g(2);
  g << 0.3, -1.2;
  auto a = dense(fock::annihilation_op<double>(b, g));
  EXPECT_EQ(a.col(*b.find({0, 0})).norm(), 0.0);
  EXPECT_EQ(fock::annihilation_op<double>(b, g).change, -1);
}

TEST(Ladder, LinearityAndAdjoint) {
  FockBasis b(2, 5);
  auto sum = dense(fock::creation_op<double>(b, Vector::Ones(2)));
  Matrix parts = dense(fock::creation_op<double>(b, unit(2, 0))) + dense(fock::creation_op<double>(b, unit(2, 1)));
  EXPECT_EQ((sum - parts).norm(), 0.0);
  Vector g(2);
  g << 0.7, -0.4;
  EXPECT_EQ((dense(fock::annihilation_op<double>(b, g)) - dense(fock::creation_op<double>(b, g)).transpose()).norm(),
            0.0);
}

TEST(Ladder, CanonicalCommutationOnGuardedStates) {
  FockBasis b(3, 6);
  Vector g(3), h(3);
  g << 0.5, -1.0, 2.0;
  h << 1.5, 0.25, -0.75;
  EXPECT_LE(fock::ccr_residual<double>(b, g, h), 1e-12);
  auto ag = dense(fock::annihilation_op<double>(b, g)), ah = dense(fock::annihilation_op<double>(b, h));
  Matrix comm = ag * ah - ah * ag;
  for (std::size_t j = 0; j < b.size(); ++j)
    if (b.total(j) <= b.nmax() - 2) EXPECT_LE(comm.col(j).norm(), 1e-12);
  CVector gc(2), hc(2);
  gc << std::complex<double>(0.3, 0.4), std::complex<double>(-1.0, 0.2);
  hc << std::complex<double>(0.1, -0.9), std::complex<double>(0.5, 0.5);
  EXPECT_LE(fock::ccr_residual<std::complex<double>>(FockBasis(2, 6), gc, hc), 1e-12);
}

TEST(Ladder, AnnihilationBoundOnGuardedStates) {
  // ||a(f) Psi||^2 <= ||omega^{-s/2} f||^2 <Psi, dGamma(omega^s) Psi> for s in {0, 1}
  FockBasis b(3, 6);
  Vector w(3), f(3);
  w << 1.0, 2.0, 4.5;
  f << 0.8, -0.3, 1.1;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  auto a = fock::annihilation_op<double>(b, f);
  for (int trial = 0; trial < 20; ++trial) {
    Vector psi = Vector::Zero(b.size());
    for (std::size_t i = 0; i < b.size(); ++i)
      if (b.total(i) <= b.nmax() - 2) psi(i) = n(rng);
    double lhs = (a.matrix * psi).squaredNorm();
    for (double s : {0.0, 1.0}) {
      Matrix ws = w.array().pow(s).matrix().asDiagonal();
      double rhs = (w.array().pow(-s) * f.array().square()).sum() * psi.dot(fock::second_quantize<double>(b, ws).matrix * psi);
      EXPECT_LE(lhs, rhs * (1 + 1e-12));
    }
  }
}

TEST(SecondQuantize, NumberOperator) {
  FockBasis b(3, 4);
  auto n = dense(fock::number_op<double>(b));
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_DOUBLE_EQ(n(i, i), b.total(i));
  EXPECT_EQ((n - Matrix(n.diagonal().asDiagonal())).norm(), 0.0);
}

TEST(SecondQuantize, DiagonalOneBody) {
  FockBasis b(3, 4);
  Vector w(3);
  w << 1.0, 1.3, 2.9;
  auto g = dense(fock::second_quantize<double>(b, Matrix(w.asDiagonal())));
  for (std::size_t i = 0; i < b.size(); ++i) {
    double e = 0;
    for (int j = 0; j < 3; ++j) e += b.state(i)[j] * w(j);
    EXPECT_NEAR(g(i, i), e, 1e-14);
  }
}

TEST(SecondQuantize, RandomSymmetricSpectrum) {
  std::mt19937_64 rng(8);
  Matrix A = oracle::random_symmetric(rng, 3);
  FockBasis b(3, 4);
  auto mu = oracle::jacobi(A).values;
  std::vector<double> expect;
  for (std::size_t i = 0; i < b.size(); ++i) {
    double e = 0;
    for (int j = 0; j < 3; ++j) e += b.state(i)[j] * mu(j);
    expect.push_back(e);
  }
  std::sort(expect.begin(), expect.end());
  auto got = oracle::jacobi(dense(fock::second_quantize<double>(b, A))).values;
  for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_NEAR(got(i), expect[i], 1e-10);
}

TEST(NormalOrdered, ZeroAndSingleModeElements) {
  FockBasis b(1, 8);
  EXPECT_EQ(fock::normal_ordered_square<double>(b, Vector::Zero(1)).matrix.norm(), 0.0);
  auto q = dense(fock::normal_ordered_square<double>(b, Vector::Ones(1)));
  for (int n = 0; n + 2 <= 8; ++n)
    EXPECT_NEAR(q(*b.find({n}), *b.find({n + 2})), std::sqrt((n + 1.0) * (n + 2.0)), 1e-13);
  for (int n = 0; n <= 8; ++n) EXPECT_NEAR(q(n, n), 2.0 * n, 1e-13);
  EXPECT_EQ((q - q.transpose()).norm(), 0.0);
}

TEST(Hamiltonian, ZeroCouplingAndRoutes) {
  FockBasis b(3, 5);
  Vector w(3), f(3);
  w << 1.0, 1.3, 1.7;
  f << 0.3, 0.2, 0.1;
  auto h0 = fock::build_hamiltonian<double>(b, w, f, 0.0);
  EXPECT_LE((dense(h0.quadratic) - dense(fock::second_quantize<double>(b, Matrix(w.asDiagonal())))).norm(), 1e-15);
  auto h = fock::build_hamiltonian<double>(b, w, f, 0.2);
  EXPECT_LE((dense(h.quadratic) - dense(h.normal_ordered)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((dense(h.quadratic) - dense(h.quadratic).transpose()).norm(), 1e-15);
}

TEST(Hamiltonian, SingleModeExplicitMatrix) {
  const double lam = 0.7;
  FockBasis b(1, 10);
  auto h = dense(fock::build_hamiltonian<double>(b, Vector::Ones(1), Vector::Ones(1), lam).quadratic);
  Matrix ref = Matrix::Zero(11, 11);
  for (int n = 0; n <= 10; ++n) ref(n, n) = (1 + 2 * lam) * n;
  for (int n = 0; n + 2 <= 10; ++n) ref(n, n + 2) = ref(n + 2, n) = lam * std::sqrt((n + 1.0) * (n + 2.0));
  EXPECT_LE((h - ref).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Spectral, ZeroCouplingExact) {
  auto m = modes({1.0, 1.3, 1.7}, {0.3, 0.2, 0.1}, 0.0);
  auto s = fock::spectral_compare(FockBasis(3, 6), m, 10);
  EXPECT_LE(s.max_gap, 1e-13);
  EXPECT_EQ(s.status, fock::Status::pass);
}

TEST(Spectral, SingleModeGroundEnergy) {
  auto m = modes({1.0}, {1.0}, 2.0);
  auto h = fock::build_hamiltonian<double>(FockBasis(1, 60), m.omega, m.fhat(), 2.0);
  double e0 = fock::dense_eig(h.quadratic).eigenvalues()(0);
  EXPECT_NEAR(e0, oracle::scalar_bogoliubov(1.0, 1.0, 2.0).energy, 1e-6);
  EXPECT_NEAR(e0, -1.0, 1e-6);
}

TEST(Spectral, ThreeModeLowestLevels) {
  auto m = modes({1.0, 1.3, 1.7}, {0.3, 0.2, 0.1}, 0.2);
  auto s = fock::spectral_compare(FockBasis(3, 8), m, 10, 1e-4);
  EXPECT_LE(s.max_gap, 1e-4);
  EXPECT_LE(s.truncation_change, 1e-4);
  EXPECT_EQ(s.status, fock::Status::pass);
  // predicted levels from an independent xi
  Vector psi = m.omega.cwiseSqrt().cwiseProduct(m.fhat());
  Vector nu = oracle::jacobi(oracle::rank_one_dense(m.omega.cwiseAbs2(), psi, 0.8)).values.cwiseSqrt();
  double e0 = 0.5 * (nu.sum() - m.omega.sum()) - 0.2 * m.fhat().squaredNorm();
  EXPECT_NEAR(s.predicted_levels.front(), e0, 1e-12);
  EXPECT_NEAR(s.predicted_levels[1], e0 + nu(0), 1e-12);
}

TEST(Spectral, TruncationNotConvergedIsInconclusive) {
  auto m = modes({1.0}, {1.0}, 2.0);
  auto s = fock::spectral_compare(FockBasis(1, 6), m, 3, 1e-8);
  EXPECT_EQ(s.status, fock::Status::inconclusive);
}

TEST(VacuumNumber, ZeroCoupling) {
  auto m = modes({1.0, 2.0}, {0.5, 0.5}, 0.0);
  auto v = fock::vacuum_number_expectation(FockBasis(2, 6), m);
  EXPECT_NEAR(v.fock, 0.0, 1e-15);
  EXPECT_EQ(v.shale, 0.0);
}

TEST(VacuumNumber, SingleModeApproachesShale) {
  auto m = modes({1.0}, {1.0}, 2.0);
  double prev = 1.0;
  for (int nmax : {20, 40, 60}) {
    auto v = fock::vacuum_number_expectation(FockBasis(1, nmax), m);
    EXPECT_NEAR(v.shale, 1.0 / 3.0, 1e-14);
    double gap = std::abs(v.fock - 1.0 / 3.0);
    EXPECT_LE(gap, prev);
    prev = gap;
  }
  EXPECT_LE(prev, 1e-6);
}

TEST(VacuumNumber, ThreeModes) {
  auto m = modes({1.0, 1.3, 1.7}, {0.3, 0.2, 0.1}, 0.2);
  auto v = fock::vacuum_number_expectation(FockBasis(3, 10), m);
  EXPECT_NEAR(v.fock, v.shale, 5e-3);
}

TEST(RelativeBound, Vacuum) {
  FockBasis b(2, 6);
  Vector f(2);
  f << 0.6, 0.8;
  Vector vac = Vector::Unit(b.size(), 0);
  auto t = fock::bound_terms(b, f, vac);
  EXPECT_NEAR(t.lhs, std::sqrt(2.0) * f.squaredNorm(), 1e-14);  // only a*(f)^2 survives
  EXPECT_LE(t.lhs, t.sqrt6_rhs);
  EXPECT_TRUE(t.components_ok);
}

TEST(RelativeBound, NumberEigenstates) {
  FockBasis b(1, 30);
  for (int n = 0; n <= 28; ++n) {
    Vector e = Vector::Unit(b.size(), n);
    auto t = fock::bound_terms(b, Vector::Ones(1), e);
    EXPECT_TRUE(t.components_ok) << n;
    EXPECT_NEAR(t.lhs, std::sqrt(n * (n - 1.0) + (n + 1.0) * (n + 2.0) + 4.0 * n * n), 1e-12);
    EXPECT_LE(t.lhs, t.sqrt6_rhs * (1 + 1e-12)) << n;
  }
}

TEST(RelativeBound, RandomStates) {
  Vector f(2);
  f << 0.4, 0.7;
  auto r = fock::relative_bound_check(FockBasis(2, 8), f, 200, 17);
  EXPECT_EQ(r.sqrt6_violations, 0);
  EXPECT_EQ(r.safe_violations, 0);
  EXPECT_EQ(r.component_violations, 0);
}

TEST(RelativeBound, CoherentEvenSuperpositionExceedsSqrt6) {
  // equal weights on |2k>, 5 <= k <= 15: the a^2, a*^2 and 2 a* a terms add in phase
  FockBasis b(1, 40);
  Vector psi = Vector::Zero(b.size());
  for (int k = 5; k <= 15; ++k) psi(2 * k) = 1.0;
  psi.normalize();
  auto t = fock::bound_terms(b, Vector::Ones(1), psi);
  EXPECT_GT(t.lhs, t.sqrt6_rhs);
  EXPECT_LE(t.lhs, t.safe_rhs);
  EXPECT_TRUE(t.components_ok);
}

TEST(FormBound, GroundEnergyBelowZeroAboveCoupledNorm) {
  auto m = modes({1.0, 1.3, 1.7}, {0.3, 0.2, 0.1}, 0.2);
  auto h = fock::build_hamiltonian<double>(FockBasis(3, 8), m.omega, m.fhat(), 0.2);
  double e0 = fock::dense_eig(h.quadratic).eigenvalues()(0);
  EXPECT_LE(e0, 0.0);
  EXPECT_GE(e0, -0.2 * m.fhat().squaredNorm());
}

TEST(FormBound, HalfPowerSquaredBelowNumberTimesEnergy) {
  // dGamma(omega^{1/2})^2 <= N dGamma(omega) on each particle-number sector
  FockBasis b(3, 5);
  Vector w(3);
  w << 1.0, 2.2, 5.0;
  Matrix h = dense(fock::second_quantize<double>(b, Matrix(w.cwiseSqrt().asDiagonal())));
  Matrix n = dense(fock::number_op<double>(b));
  Matrix g = dense(fock::second_quantize<double>(b, Matrix(w.asDiagonal())));
  Matrix d = n * g - h * h;
  EXPECT_GE(oracle::jacobi(0.5 * (d + d.transpose())).values(0), -1e-12);
}

TEST(Gauge, RealFormFactorIdentical) {
  FockBasis b(2, 5);
  Vector w(2), f(2);
  w << 1.0, 1.5;
  f << 0.4, 0.3;
  EXPECT_LE(fock::gauge_equivalence(b, w, f.cast<std::complex<double>>(), 0.3), 1e-13);
}

TEST(Gauge, PhasesLeaveSpectrumInvariant) {
  FockBasis b(2, 6);
  Vector w(2), g(2);
  w << 1.0, 1.5;
  g << 0.4, 0.3;
  for (double th : {std::numbers::pi / 3, std::numbers::pi / 2}) {
    CVector f = g.cast<std::complex<double>>() * std::polar(1.0, th);
    EXPECT_LE(fock::gauge_equivalence(b, w, f, 0.3), 1e-10);
  }
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n;
  CVector f(2);
  for (int i = 0; i < 2; ++i) f(i) = {0.3 * n(rng), 0.3 * n(rng)};
  EXPECT_LE(fock::gauge_equivalence(b, w, f, 0.3), 1e-10);
}

TEST(CoarseGrid, ComparisonAgainstSameOneBodyData) {
  model::ScenarioConfig c;
  c.f.exponent = -1.0;
  c.grid.k_max = 10.0;
  c.grid.nodes = 40;
  c.lambda = 0.1;
  auto m = model::coarse_grain(model::build_model(c), 2);
  auto s = fock::spectral_compare(FockBasis(2, 12), m, 6, 1e-4);
  EXPECT_EQ(s.status, fock::Status::pass);
}
