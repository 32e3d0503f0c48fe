#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qbren/bogoliubov.hpp"
#include "qbren/model.hpp"

using namespace qbren;
using bogoliubov::XiMode;
using numerics::Matrix;
using numerics::Vector;
using rankone::Method;

namespace {

model::DiscretizedModel grid_model(double p, double alpha, double kmax, int nodes, double lambda) {
  model::ScenarioConfig c;
  c.omega.p = p;
  c.f.exponent = alpha;
  c.grid.k_max = kmax;
  c.grid.nodes = nodes;
  c.lambda = lambda;
  return model::build_model(c);
}

model::DiscretizedModel single_mode(double w, double f, double lambda) {
  model::DiscretizedModel m;
  m.k = Vector::Ones(1);
  m.w = Vector::Ones(1);
  m.omega = Vector::Constant(1, w);
  m.f = numerics::CVector::Constant(1, f);
  m.lambda = lambda;
  return m;
}

Matrix xi_oracle(const model::DiscretizedModel& m) {
  Vector psi = m.omega.cwiseSqrt().cwiseProduct(m.fhat());
  Matrix t = oracle::rank_one_dense(m.omega.cwiseAbs2(), psi, 4 * m.lambda);
  return oracle::matrix_function(t, [](double x) { return std::sqrt(x); });
}

}  // namespace

TEST(Xi, ZeroCouplingIsOmega) {
  auto m = grid_model(1.0, -1.0, 100.0, 16, 0.0);
  auto x = bogoliubov::build_xi(m, XiMode::direct);
  EXPECT_LE((x.xi - Matrix(m.omega.asDiagonal())).norm(), 1e-13);
}

TEST(Xi, SingleModeScalar) {
  auto m = single_mode(1.0, 1.0, 2.0);
  for (auto method : {Method::secular, Method::eig})
    EXPECT_NEAR(bogoliubov::build_xi(m, XiMode::direct, method).xi(0, 0), 3.0, 1e-14);
  EXPECT_NEAR(bogoliubov::build_xi(m, XiMode::direct, Method::quadrature).xi(0, 0), 3.0, 1e-8);
  EXPECT_NEAR(bogoliubov::build_xi(m, XiMode::regular).xi(0, 0), 3.0, 1e-12);
}

TEST(Xi, GridAgainstDenseOracle) {
  auto m = grid_model(1.0, -0.5, 100.0, 64, 0.7);
  Matrix ref = xi_oracle(m);
  for (auto method : {Method::secular, Method::eig})
    EXPECT_LE(oracle::rel(bogoliubov::build_xi(m, XiMode::direct, method).xi, ref), 1e-10);
  EXPECT_LE(oracle::rel(bogoliubov::build_xi(m, XiMode::direct, Method::quadrature).xi, ref), 1e-6);
}

TEST(Xi, ModesAgreeWhereHypothesesOverlap) {
  auto m = grid_model(1.0, -1.0, 100.0, 48, 0.5);
  auto direct = bogoliubov::build_xi(m, XiMode::direct).xi;
  EXPECT_LE(oracle::rel(bogoliubov::build_xi(m, XiMode::regular).xi, direct), 1e-6);
  EXPECT_LE(oracle::rel(bogoliubov::build_xi(m, XiMode::regular, Method::quadrature).xi, direct), 1e-6);

  auto mr = grid_model(1.0, -1.0, 100.0, 48, -0.4);
  auto mt = mr;
  mt.lambda = 1.0 / (1.0 / mr.lambda - 4.0 * std::pow(mr.norm(0.5), 2));
  Matrix ref = xi_oracle(mt);
  EXPECT_LE(oracle::rel(bogoliubov::build_xi(mr, XiMode::renormalized).xi, ref), 1e-6);
  EXPECT_LE(oracle::rel(bogoliubov::build_xi(mr, XiMode::renormalized, Method::quadrature).xi, ref), 1e-6);
  EXPECT_THROW(bogoliubov::build_xi(m, XiMode::renormalized), DomainError);
}

TEST(Xi, DominatesOmega) {
  auto m = grid_model(1.0, -0.5, 100.0, 40, 0.8);
  auto x = bogoliubov::build_xi(m, XiMode::direct);
  Matrix d = x.xi;
  d.diagonal() -= m.omega;
  EXPECT_GE(oracle::jacobi(d).values(0), -1e-9);
  Vector w = m.omega;
  std::sort(w.data(), w.data() + w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) EXPECT_GE(x.spec.values(i), w(i) - 1e-12);
}

TEST(Xi, PositivityViolationNamesContourNode) {
  auto m = single_mode(1.0, 1.0, -1.0);
  try {
    bogoliubov::build_xi(m, XiMode::direct);
    FAIL() << "expected a positivity error";
  } catch (const NotPositiveError& e) {
    EXPECT_NE(std::string(e.what()).find("t = 0"), std::string::npos);
  }
}

TEST(Blocks, ZeroCoupling) {
  auto m = grid_model(1.0, -1.0, 100.0, 16, 0.0);
  auto b = bogoliubov::build_blocks(m, XiMode::direct);
  EXPECT_LE((b.U - Matrix::Identity(16, 16)).norm(), 1e-14);
  EXPECT_LE(b.V.norm(), 1e-14);
  EXPECT_LE(bogoliubov::diagonalization_residual(b), 1e-13);
  EXPECT_EQ(bogoliubov::ground_energy(b), 0.0);
}

TEST(Blocks, SingleModeScalarChain) {
  auto m = single_mode(1.0, 1.0, 2.0);
  auto b = bogoliubov::build_blocks(m, XiMode::direct);
  auto s = oracle::scalar_bogoliubov(1.0, 1.0, 2.0);
  EXPECT_NEAR(b.U(0, 0), 2.0 / std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(b.V(0, 0), -1.0 / std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(b.U(0, 0), s.U, 1e-14);
  EXPECT_NEAR(b.U(0, 0) * b.U(0, 0) - b.V(0, 0) * b.V(0, 0), 1.0, 1e-14);
  EXPECT_LE(bogoliubov::diagonalization_residual(b), 1e-12);
  EXPECT_NEAR(bogoliubov::ground_energy(b), -1.0, 1e-14);
  EXPECT_NEAR(bogoliubov::shale_trace(b).direct, 1.0 / 3.0, 1e-14);
}

TEST(Blocks, BlockOffDiagonalByDirectMultiplication) {
  auto m = grid_model(1.0, -0.5, 100.0, 32, 0.6);
  auto b = bogoliubov::build_blocks(m, XiMode::direct);
  const Eigen::Index n = 32;
  Matrix A(2 * n, 2 * n), W(2 * n, 2 * n);
  A << b.h, b.k, b.k, b.h;
  W << b.U, b.V, b.V, b.U;
  Matrix P = W.transpose() * A * W;
  double off = std::max(P.topRightCorner(n, n).norm(), P.bottomLeftCorner(n, n).norm());
  EXPECT_LE(off, 1e-8 * A.norm());
  EXPECT_LE(oracle::rel(Matrix(P.topLeftCorner(n, n)), b.xi), 1e-8);
  EXPECT_LE(bogoliubov::diagonalization_residual(b), 1e-8);
}

TEST(Blocks, SymplecticInvariants) {
  for (double lam : {0.3, 2.0}) {
    auto m = grid_model(1.0, -0.25, 1e3, 64, lam);
    auto b = bogoliubov::build_blocks(m, XiMode::direct);
    auto p = bogoliubov::block_pair(b);
    EXPECT_LE((p.V * p.S * p.V.transpose() - p.S).norm(), 1e-8);
    EXPECT_LE((p.V.transpose() * p.S * p.V - p.S).norm(), 1e-8);
    EXPECT_LE((b.U.transpose() * b.U - b.V.transpose() * b.V - Matrix::Identity(64, 64)).norm(), 1e-8);
    EXPECT_LE(bogoliubov::symplectic_residual(b), 1e-8);
  }
}

TEST(Blocks, QuadratureRootsAgree) {
  auto m = grid_model(1.0, -1.0, 100.0, 24, 0.5);
  auto e = bogoliubov::build_blocks(m, XiMode::direct);
  auto q = bogoliubov::build_blocks(m, XiMode::direct, Method::quadrature);
  EXPECT_LE(oracle::rel(q.U, e.U), 1e-6);
  EXPECT_LE(oracle::rel(q.V, e.V), 1e-6);
}

TEST(Shale, ZeroFormFactor) {
  auto m = grid_model(1.0, -1.0, 100.0, 16, 1.0);
  m.f.setZero();
  EXPECT_EQ(bogoliubov::shale_trace(bogoliubov::build_blocks(m, XiMode::direct)).direct, 0.0);
}

TEST(Shale, EntrywiseSumIdentityAndBound) {
  auto m = grid_model(1.0, -0.5, 1e3, 64, 0.9);
  auto b = bogoliubov::build_blocks(m, XiMode::direct);
  auto s = bogoliubov::shale_trace(b);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < 64; ++i)
    for (Eigen::Index j = 0; j < 64; ++j) sum += b.V(i, j) * b.V(i, j);
  EXPECT_NEAR(s.direct, sum, 1e-14 * sum);
  EXPECT_NEAR(s.identity, s.direct, 1e-8 * std::max(1.0, s.direct));
  EXPECT_NEAR(s.bound, 0.5 * m.lambda * std::pow(m.norm(0.5), 2), 1e-12);
  EXPECT_LE(s.direct, s.bound);
}

TEST(GroundEnergy, TraceRecombination) {
  auto m = grid_model(1.0, -1.0, 100.0, 32, 0.4);
  auto b = bogoliubov::build_blocks(m, XiMode::direct);
  double trxw = b.xi.trace() - m.omega.sum();
  double f2 = m.fhat().squaredNorm();
  double e = bogoliubov::ground_energy(b);
  EXPECT_NEAR(e, 0.5 * (b.xi - b.h).trace(), 1e-10);
  EXPECT_NEAR(e, 0.25 * trxw + 0.25 * (trxw - 4 * m.lambda * f2), 1e-10);
}

TEST(GroundEnergy, PivotalTraceIdentity) {
  auto m = grid_model(1.0, -1.0, 1e3, 64, 0.7);
  auto t = bogoliubov::pivotal_trace_identity(bogoliubov::build_blocks(m, XiMode::direct));
  EXPECT_NEAR(t.lhs, t.rhs, 1e-7 * std::max(1.0, std::abs(t.rhs)));
  EXPECT_NEAR(t.rhs, t.analytic, 1e-7 * std::max(1.0, std::abs(t.rhs)));
}

TEST(FormalTrace, ZeroCoupling) {
  auto m = grid_model(1.0, -1.0, 100.0, 16, 0.0);
  EXPECT_EQ(bogoliubov::formal_trace(m).value, 0.0);
}

TEST(FormalTrace, EqualsMatrixTraceOnRegularScenario) {
  auto m = grid_model(1.0, -1.0, 1e3, 64, 1.0);
  auto ft = bogoliubov::formal_trace(m);
  double direct = (bogoliubov::build_xi(m, XiMode::direct).xi - [&] {
                    Matrix h = 2 * m.lambda * m.fhat() * m.fhat().transpose();
                    h.diagonal() += m.omega;
                    return h;
                  }())
                      .trace();
  EXPECT_LT(ft.value, 0.0);
  EXPECT_NEAR(ft.value, direct, 1e-7 * std::abs(direct));
  EXPECT_FALSE(ft.divergent);
  double q = std::pow(m.norm(0.25), 4);
  EXPECT_LE(std::abs(ft.value), 16 * std::numbers::sqrt2 * m.lambda * m.lambda * q);
}

TEST(FormalTrace, DivergenceReportedWhenQuarterNormGrows) {
  // omega = k^2, f = k^0.3: omega^{-1/2} f in H but omega^{-1/4} f is not
  auto m = grid_model(2.0, 0.3, 1e3, 256, 0.5);
  auto ft = bogoliubov::formal_trace(m, {1e2, 1e3, 1e4});
  EXPECT_TRUE(ft.divergent);
  EXPECT_GT(ft.exponent, 0.05);
}
