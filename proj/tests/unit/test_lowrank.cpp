#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "robsub/linalg.hpp"
#include "robsub/lowrank.hpp"

using namespace robsub;

namespace {

const Exponent kInf = Exponent::infinity();

PsdSolution with_x(Mat x) {
  PsdSolution s;
  s.X = std::move(x);
  return s;
}

Mat diag(std::initializer_list<double> d) {
  Vec v(static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

void expect_valid(const Projection& p) {
  const Mat b = p.basis();
  EXPECT_LE((b.transpose() * b - Mat::Identity(p.rank(), p.rank())).norm(), 1e-8);
}

}  // namespace

TEST(RoundTruncateGreedy, Examples) {
  const Mat pstar = oracle::random_basis(5, 2, 1) * oracle::random_basis(5, 2, 1).transpose();
  const Projection p = round_truncate_greedy(with_x(pstar), Mat::Identity(5, 5), 3, 1.0);
  EXPECT_EQ(p.rank(), 2);
  EXPECT_LE((p.matrix() - pstar).norm(), 1e-8);

  const Projection g = round_truncate_greedy(with_x(diag({0.9, 0.9, 0.0})), diag({5, 1, 0}), 1, 1.0);
  ASSERT_EQ(g.rank(), 1);
  EXPECT_NEAR(std::abs(g.basis()(0, 0)), 1.0, 1e-12);

  EXPECT_EQ(round_truncate_greedy(with_x(diag({0.4, 0.4})), Mat::Identity(2, 2), 1, 1.0).rank(), 0);
}

TEST(TruncateEigenvalues, Threshold) {
  EXPECT_EQ(truncate_eigenvalues(diag({0.9, 0.5, 0.49}), 0.5).rank(), 2);
  EXPECT_EQ(truncate_eigenvalues(Mat::Zero(3, 3), 0.5).rank(), 0);
}

// <I - P, M> <= eps / delta tr M whenever <M, X> >= (1 - eps) tr M.
TEST(RoundTruncateGreedy, TruncationInequality) {
  for (int s = 0; s < 100; ++s) {
    const Index n = 2 + s % 7;
    Mat x = oracle::random_psd(n, n, 100 + s);
    x = oracle::project_spectrahedron(x, double(n));  // 0 <= X <= I
    const Mat m = oracle::random_psd(n, 1 + s % n, 200 + s);
    const double tr = m.trace();
    const double eps = 1.0 - m.cwiseProduct(x).sum() / tr;
    const double delta = 0.5;
    const Projection p = truncate_eigenvalues(x, 1.0 - delta);
    const double lost = (Mat::Identity(n, n) - p.matrix()).cwiseProduct(m).sum();
    EXPECT_LE(lost, eps / delta * tr + 1e-9);
  }
}

// inf -> 1 norm of the truncated projector is at most that of X over 1 - delta.
TEST(RoundTruncateGreedy, MonotoneRescaling) {
  for (int s = 0; s < 30; ++s) {
    const Index n = 2 + s % 7;
    const Mat x = oracle::project_spectrahedron(oracle::random_psd(n, n, 300 + s) / double(n), double(n));
    const double delta = 0.5;
    const Projection p = truncate_eigenvalues(x, 1.0 - delta);
    EXPECT_LE(oracle::inf_to_1(p.matrix()), oracle::inf_to_1(x) / (1.0 - delta) + 1e-9);
  }
}

TEST(Errors, FrobeniusAndSpectral) {
  const Mat a = oracle::gaussian(5, 7, 4);
  const Projection p = orthonormalize(oracle::gaussian(5, 2, 5));
  const Mat res = a - p.matrix() * a;
  EXPECT_NEAR(frobenius_error(DataMatrix(a), p), res.squaredNorm(), 1e-10);
  EXPECT_NEAR(spectral_error(DataMatrix(a), p), oracle::spectral(res), 1e-10);
  // The residual is the best over matrices with that column space.
  const Mat b = p.basis() * (p.basis().transpose() * a + 0.1 * oracle::gaussian(2, 7, 6));
  EXPECT_LE(frobenius_error(DataMatrix(a), p), (a - b).squaredNorm());
}

TEST(Frobenius, PlantedSparseRankOne) {
  const Vec v = (Vec(6) << 1, -1, 0, 0, 0, 0).finished() / std::sqrt(2.0);
  const Mat a = v * oracle::gaussian(1, 10, 7);
  const double kappa = oracle::inf_to_2(v * v.transpose());
  const PcaResult res = robust_pca_frobenius(DataMatrix(a), 1, RobustnessBudget(kInf, kappa), SolveParams{});
  EXPECT_LE(frobenius_error(DataMatrix(a), res.projection), 1e-3 * a.squaredNorm());
  EXPECT_LE(res.certified_q_to_2(), 2.0 * kappa);
  EXPECT_GE(res.norm.upper_bound, oracle::inf_to_1(res.projection.matrix()) - 1e-9);
  expect_valid(res.projection);
}

TEST(Frobenius, IdentityFour) {
  const Mat a = Mat::Identity(4, 4);
  SolveParams p;
  const PcaResult res = robust_pca_frobenius(DataMatrix(a), 1, RobustnessBudget(kInf, 1.0), p);
  const double err = frobenius_error(DataMatrix(a), res.projection);
  EXPECT_GE(err, 3.0 - 1e-9);
  EXPECT_LE(err, 3.0 * (2.0 + p.gamma) + 0.05);
  EXPECT_LE(res.projection.rank(), 1);
}

TEST(Frobenius, HalfVector) {
  const Mat a = Mat::Constant(4, 1, 0.5);
  SolveParams p;
  const PcaResult res = robust_pca_frobenius(DataMatrix(a), 1, RobustnessBudget(kInf, std::sqrt(2.0)), p);
  EXPECT_LE(frobenius_error(DataMatrix(a), res.projection), (2.0 + p.gamma) * 0.5 + p.tol_objective);
  EXPECT_LE(res.certified_q_to_2(), std::sqrt(psd_oracle_factor(kInf) * (1.0 + 1.0 / p.gamma)) * std::sqrt(2.0));
}

TEST(Frobenius, ApproximationAgainstEnumeratedOpt) {
  for (int s = 0; s < 5; ++s) {
    const Mat a = oracle::gaussian(7, 9, 40 + s);
    // Uniform 2-sparse directions have kappa = sqrt 2; the best one bounds OPT.
    const double opt_ub = a.squaredNorm() - oracle::best_uniform_direction(a, 2);
    SolveParams p;
    p.seed = s;
    const PcaResult res = robust_pca_frobenius(DataMatrix(a), 1, RobustnessBudget(kInf, std::sqrt(2.0)), p);
    EXPECT_LE(frobenius_error(DataMatrix(a), res.projection), (2.0 + p.gamma) * opt_ub + p.tol_objective * a.squaredNorm());
    EXPECT_LE(res.certified_q_to_2(), std::sqrt(psd_oracle_factor(kInf) * (1.0 + 1.0 / p.gamma)) * std::sqrt(2.0) + 1e-9);
  }
}

TEST(Bicriteria, IdentityFourAndZero) {
  SolveParams p;
  const PcaResult res = robust_pca_frobenius_bicriteria(DataMatrix(Mat(Mat::Identity(4, 4))), 1,
                                                        RobustnessBudget(kInf, 1.0), p);
  EXPECT_LE(res.projection.rank(), 2);
  EXPECT_LE(frobenius_error(DataMatrix(Mat(Mat::Identity(4, 4))), res.projection), 3.0 * (1.0 + p.gamma) + 0.05);
  const PcaResult z = robust_pca_frobenius_bicriteria(DataMatrix(Mat::Zero(3, 2)), 1, RobustnessBudget(kInf, 1.0), p);
  EXPECT_EQ(z.projection.rank(), 0);
}

TEST(Spectral, PlantedIdentityZero) {
  SolveParams p;
  const Vec v = (Vec(5) << 0, 1, 1, 0, 0).finished() / std::sqrt(2.0);
  const Mat a = v * oracle::gaussian(1, 8, 9);
  const PcaResult planted = robust_pca_spectral(DataMatrix(a), 1, RobustnessBudget(kInf, std::sqrt(2.0)), p);
  EXPECT_LE(spectral_error(DataMatrix(a), planted.projection), 1e-3 * oracle::spectral(a));

  const PcaResult id = robust_pca_spectral(DataMatrix(Mat(Mat::Identity(3, 3))), 1, RobustnessBudget(kInf, 1.0), p);
  const double err = spectral_error(DataMatrix(Mat(Mat::Identity(3, 3))), id.projection);
  EXPECT_GE(err, 1.0 - 1e-9);
  EXPECT_LE(err, std::sqrt(3.0 + p.gamma) + 1e-3);
  EXPECT_LE(id.certified_q_to_2(), std::sqrt(psd_oracle_factor(kInf) * (1.0 + 2.0 / p.gamma)) + 1e-9);

  const PcaResult z = robust_pca_spectral(DataMatrix(Mat::Zero(3, 3)), 1, RobustnessBudget(kInf, 1.0), p);
  EXPECT_NEAR(spectral_error(DataMatrix(Mat::Zero(3, 3)), z.projection), 0.0, 1e-12);
}

TEST(Spectral, BicriteriaRank) {
  SolveParams p;
  const Mat a = oracle::gaussian(6, 8, 10);
  const PcaResult res = robust_pca_spectral(DataMatrix(a), 1, RobustnessBudget(kInf, 1.5), p, true);
  EXPECT_LE(res.projection.rank(), 3);
  expect_valid(res.projection);
}

TEST(RecoverSubspace, NoiselessNoisyAndRankZero) {
  const Vec v = (Vec(8) << 1, 1, 1, 1, 0, 0, 0, 0).finished() / 2.0;
  const Projection star = Projection::from_orthonormal(Mat(v));
  const Mat clean = v * oracle::gaussian(1, 30, 11);
  SolveParams p;
  const RobustnessBudget budget(kInf, 2.0);
  const PcaResult r0 = recover_subspace(DataMatrix(clean), 1, budget, p, 1.0);
  EXPECT_LE(std::sqrt(sin_theta_sq(r0.projection, star)), 1e-3);
  EXPECT_EQ(r0.theta, 1.0);

  // Frobenius noise of size eps |A|; theta = sigma_1 of the planted part.
  for (int s = 0; s < 5; ++s) {
    const Mat planted = v * oracle::gaussian(1, 30, 20 + s);
    const double theta = oracle::spectral(planted);
    const double eps = 0.05;
    Mat noise = oracle::gaussian(8, 30, 30 + s);
    noise *= eps * oracle::spectral(planted) / noise.norm();
    const Mat a = planted + noise;
    const PcaResult r = recover_subspace(DataMatrix(a), 1, budget, p, theta);
    EXPECT_LE(std::sqrt(sin_theta_sq(r.projection, star)), 10.0 * eps * oracle::spectral(a) / theta);
  }

  const PcaResult rz = recover_subspace(DataMatrix(clean), 0, budget, p, 1.0);
  EXPECT_EQ(rz.projection.rank(), 0);
  EXPECT_NEAR(sin_theta_sq(rz.projection, star), star.matrix().squaredNorm(), 1e-12);
}

TEST(CertifyProjection, BracketsExact) {
  for (int s = 0; s < 10; ++s) {
    const Projection p = orthonormalize(oracle::gaussian(6, 1 + s % 3, 50 + s));
    const NormEstimate e = certify_projection(p, kInf);
    const double exact = oracle::inf_to_1(p.matrix());
    EXPECT_LE(e.lower_bound, exact + 1e-9);
    EXPECT_GE(e.upper_bound, exact - 1e-9);
  }
}
