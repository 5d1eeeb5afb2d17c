#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "robsub/error.hpp"
#include "robsub/linalg.hpp"
#include "robsub/opnorms.hpp"
#include "robsub/sdpsolve.hpp"

using namespace robsub;

namespace {

const Exponent kInf = Exponent::infinity();

void expect_feasible(const PsdSolution& s, double r, double kappa, bool trace_equal = false) {
  const Vec ev = oracle::eigenvalues_desc(s.X);
  EXPECT_GE(ev.minCoeff(), -1e-6);
  EXPECT_LE(ev.maxCoeff(), 1.0 + 1e-6);
  if (trace_equal) EXPECT_NEAR(s.X.trace(), r, 1e-6);
  else EXPECT_LE(s.X.trace(), r + 1e-6);
  EXPECT_LE(s.norm_certificate, psd_oracle_factor(kInf) * kappa * kappa + 1e-6);
  if (s.X.rows() <= 12) EXPECT_LE(oracle::inf_to_1(s.X), s.norm_certificate + 1e-6);
}

// l_1 ball projection by sorting.
Vec project_l1(const Vec& y, double radius) {
  if (y.lpNorm<1>() <= radius) return y;
  std::vector<double> u(y.size());
  for (Index i = 0; i < y.size(); ++i) u[std::size_t(i)] = std::abs(y(i));
  std::sort(u.rbegin(), u.rend());
  double cum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double t = (cum - radius) / double(j + 1);
    if (u[j] > t) theta = t;
  }
  return y.unaryExpr([theta](double v) { return (v > 0 ? 1.0 : -1.0) * std::max(std::abs(v) - theta, 0.0); });
}

Mat e1_copies() {
  Mat a = Mat::Zero(3, 4);
  a.row(0).setOnes();
  return a;
}

}  // namespace

TEST(ProjectSpectrahedron, MatchesEigenBisection) {
  for (int s = 0; s < 20; ++s) {
    const Index n = 2 + s % 7;
    Mat y = oracle::gaussian(n, n, 10 + s);
    y = 0.5 * (y + y.transpose());
    const double r = 1.0 + s % 3;
    const Mat p = project_spectrahedron(y, r, false);
    EXPECT_LE((p - oracle::project_spectrahedron(y, r)).norm(), 1e-8);
  }
}

TEST(ProjectSpectrahedron, TraceEqualityVariant) {
  for (int s = 0; s < 10; ++s) {
    const Index n = 3 + s % 5;
    Mat y = -oracle::random_psd(n, n, 30 + s);  // pushes toward zero trace
    const Mat p = project_spectrahedron(y, 2.0, true);
    const Vec ev = oracle::eigenvalues_desc(p);
    EXPECT_NEAR(p.trace(), 2.0, 1e-8);
    EXPECT_GE(ev.minCoeff(), -1e-10);
    EXPECT_LE(ev.maxCoeff(), 1.0 + 1e-10);
    // Optimality: no feasible point from a random sample is closer.
    for (int t = 0; t < 5; ++t) {
      Mat z = oracle::gaussian(n, n, 50 + 10 * s + t);
      const Mat q = project_spectrahedron(0.5 * (z + z.transpose()), 2.0, true);
      EXPECT_LE((p - y).norm(), (q - y).norm() + 1e-9);
    }
  }
}

TEST(ProjectEntrywiseBall, InfL1L2) {
  const Mat y = oracle::gaussian(4, 4, 3);
  const Mat c = project_entrywise_ball(y, kInf, 0.3);
  EXPECT_TRUE(c.isApprox(y.cwiseMax(-0.3).cwiseMin(0.3)));

  const Mat l2 = project_entrywise_ball(y, Exponent(2.0), 1.0);
  EXPECT_TRUE(l2.isApprox(y / y.norm(), 1e-12));

  const Mat l1 = project_entrywise_ball(y, Exponent(1.0), 2.0);
  const Vec ref = project_l1(y.reshaped(), 2.0);
  EXPECT_LE((l1.reshaped() - ref).norm(), 1e-8);

  const Mat small = 1e-3 * y;
  EXPECT_TRUE(project_entrywise_ball(small, Exponent(1.5), 10.0) == small);
  const Mat p15 = project_entrywise_ball(y, Exponent(1.5), 1.0);
  EXPECT_NEAR(entrywise_norm(p15, Exponent(1.5)), 1.0, 1e-7);
  EXPECT_NEAR(entrywise_norm(y, Exponent(1.5)), std::pow(oracle::entrywise_pow(y, 1.5), 1.0 / 1.5), 1e-10);
}

TEST(Frobenius, PlantedCoordinate) {
  const Mat a = e1_copies();
  SolveParams p;
  const PsdSolution s = solve_frobenius_relax(DataMatrix(a), 1, RobustnessBudget(kInf, 1.0), p);
  EXPECT_LE(s.objective, 1e-3 * a.squaredNorm());
  EXPECT_NEAR(s.X(0, 0), 1.0, 1e-3);
  expect_feasible(s, 1, 1.0);
}

TEST(Frobenius, ZeroData) {
  SolveParams p;
  const PsdSolution s = solve_frobenius_relax(DataMatrix(Mat::Zero(3, 2)), 1, RobustnessBudget(kInf, 1.0), p);
  EXPECT_NEAR(s.objective, 0.0, 1e-12);
  EXPECT_LE(s.X.norm(), 1e-9);
}

TEST(Frobenius, HalfVectorDominatedByBestUniformDirection) {
  const Mat a = Mat::Constant(4, 1, 0.5);
  const double best = oracle::best_uniform_direction(a, 2);
  EXPECT_NEAR(a.squaredNorm() - best, 0.5, 1e-12);
  SolveParams p;
  const PsdSolution s = solve_frobenius_relax(DataMatrix(a), 1, RobustnessBudget(kInf, std::sqrt(2.0)), p);
  EXPECT_LE(s.objective, 0.5 + p.tol_objective * a.squaredNorm());
  expect_feasible(s, 1, std::sqrt(2.0));
}

TEST(Frobenius, PlantDominanceOnRandomData) {
  for (int t = 0; t < 5; ++t) {
    const Index n = 8;
    const Mat a = oracle::gaussian(n, 12, 70 + t);
    const double kappa = std::sqrt(3.0);
    SolveParams p;
    p.seed = t;
    const PsdSolution s = solve_frobenius_relax(DataMatrix(a), 1, RobustnessBudget(kInf, kappa), p);
    // Any 3-sparse uniform direction is feasible.
    const double plant = a.squaredNorm() - oracle::best_uniform_direction(a, 3);
    EXPECT_LE(s.objective, plant + p.tol_objective * a.squaredNorm());
    expect_feasible(s, 1, kappa);
  }
}

TEST(Spectral, PlantedAndZero) {
  const Vec v = Eigen::Vector4d(1, 1, 0, 0) / std::sqrt(2.0);
  const Mat a = v * oracle::gaussian(1, 6, 4);
  SolveParams p;
  const PsdSolution s = solve_spectral_relax(DataMatrix(a), 1, RobustnessBudget(kInf, std::sqrt(2.0)), p);
  ASSERT_TRUE(s.lambda.has_value());
  EXPECT_LE(*s.lambda, 1e-3 * a.squaredNorm());
  expect_feasible(s, 1, std::sqrt(2.0));

  const PsdSolution z = solve_spectral_relax(DataMatrix(Mat::Zero(3, 3)), 1, RobustnessBudget(kInf, 1.0), p);
  EXPECT_NEAR(*z.lambda, 0.0, 1e-12);
}

// For A = c I_3 and tr X <= 1, lambda_max(c^2 (I - X)) >= c^2 (1 - 1/3), attained
// at X = I/3, whose inf -> 1 norm is exactly 1. The relaxation value is
// therefore 2c^2/3, below the c^2 of every rank-1 projection.
TEST(Spectral, ScaledIdentityRelaxationValue) {
  const double c = 2.0;
  const Mat x = Mat::Identity(3, 3) / 3.0;
  EXPECT_NEAR(oracle::inf_to_1(x), 1.0, 1e-12);
  SolveParams p;
  p.tol_objective = 1e-6;
  p.max_iterations = 20000;
  const PsdSolution s =
      solve_spectral_relax(DataMatrix(Mat(c * Mat::Identity(3, 3))), 1, RobustnessBudget(kInf, 1.0), p);
  EXPECT_NEAR(*s.lambda, 2.0 * c * c / 3.0, 1e-3 * c * c);
  expect_feasible(s, 1, 1.0);
}

TEST(Spiked, VacuousBudgetGivesTopEigenvector) {
  const Index n = 6;
  const Mat a = oracle::gaussian(n, 40, 8);
  SolveParams p;
  p.tol_objective = 1e-6;
  p.max_iterations = 20000;
  const PsdSolution s = solve_spiked_relax(DataMatrix(a), 1, RobustnessBudget(kInf, std::sqrt(double(n))), p);
  Eigen::SelfAdjointEigenSolver<Mat> es(a * a.transpose());
  const Vec top = es.eigenvectors().col(n - 1);
  EXPECT_LE((s.X - top * top.transpose()).norm(), 1e-2);
  expect_feasible(s, 1, std::sqrt(double(n)), true);
}

TEST(Spiked, PlantFeasibleAndDominated) {
  const Index n = 8, m = 300;
  Vec v = Vec::Zero(n);
  v(1) = v(4) = 1.0 / std::sqrt(2.0);
  Mat a = oracle::gaussian(n, m, 12);
  a += 1.5 * v * oracle::gaussian(1, m, 13);
  const double kappa = std::sqrt(2.0);
  SolveParams p;
  const PsdSolution s = solve_spiked_relax(DataMatrix(a), 1, RobustnessBudget(kInf, kappa), p);
  const double plant = (a.squaredNorm() - (v.transpose() * a).squaredNorm()) / double(m);
  EXPECT_LE(s.objective, plant + p.tol_objective * a.squaredNorm() / double(m));
  expect_feasible(s, 1, kappa, true);
  ASSERT_TRUE(s.entrywise_certificate.has_value());
  EXPECT_LE(*s.entrywise_certificate, kappa * kappa + 1e-6);
  EXPECT_LE(s.X.cwiseAbs().sum(), kappa * kappa + 1e-6);
}

TEST(Spiked, ZeroData) {
  SolveParams p;
  const PsdSolution s = solve_spiked_relax(DataMatrix(Mat::Zero(4, 3)), 1, RobustnessBudget(kInf, 1.5), p);
  EXPECT_NEAR(s.objective, 0.0, 1e-12);
  expect_feasible(s, 1, 1.5, true);
}

TEST(Params, Validation) {
  SolveParams p;
  p.gamma = 1.5;
  EXPECT_THROW(p.validate(), Error);
  p = SolveParams{};
  p.eta = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p = SolveParams{};
  p.max_iterations = 0;
  EXPECT_THROW(p.validate(), Error);
  EXPECT_THROW(solve_frobenius_relax(DataMatrix(Mat::Ones(2, 2)), 3, RobustnessBudget(kInf, 1.0), SolveParams{}),
               Error);
}

TEST(Ellipsoid, AgreesWithProductionOnSmallInstances) {
  SolveParams p;
  p.tol_objective = 1e-6;
  p.max_iterations = 20000;
  const RobustnessBudget budget(kInf, 1.5);
  for (int t = 0; t < 3; ++t) {
    const Mat a = oracle::gaussian(4, 6, 90 + t);
    const PsdSolution prod = solve_frobenius_relax(DataMatrix(a), 1, budget, p);
    const PsdSolution ell = solve_frobenius_relax(DataMatrix(a), 1, budget, p, SolverBackend::Ellipsoid);
    EXPECT_LE(std::abs(prod.objective - ell.objective), 1e-3 * std::max(ell.objective, 1e-3 * a.squaredNorm()));
    expect_feasible(ell, 1, 1.5);
  }
}

TEST(Ellipsoid, RejectsLargeDimension) {
  try {
    solve_frobenius_relax(DataMatrix(Mat::Ones(10, 3)), 1, RobustnessBudget(kInf, 1.0), SolveParams{},
                          SolverBackend::Ellipsoid);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooLarge);
  }
}
