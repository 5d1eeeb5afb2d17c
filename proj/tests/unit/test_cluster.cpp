#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "robsub/cluster.hpp"
#include "robsub/error.hpp"

using namespace robsub;

namespace {

const Exponent kInf = Exponent::infinity();

ClusterInstance hand_instance(const Mat& a, const Labels& labels, Index k, double sigma) {
  ClusterInstance inst;
  inst.A = DataMatrix(a);
  inst.labels = labels;
  inst.k = k;
  inst.sigma = sigma;
  inst.kappa = 1.0;
  inst.centers = Mat::Zero(a.rows(), k);
  Vec count = Vec::Zero(k);
  for (Index j = 0; j < a.cols(); ++j) {
    inst.centers.col(labels[std::size_t(j)]) += a.col(j);
    count(labels[std::size_t(j)]) += 1.0;
  }
  for (Index r = 0; r < k; ++r) inst.centers.col(r) /= count(r);
  inst.alpha = cluster_alpha(inst.kappa, 0.0, sigma, inst.centers.colwise().norm().maxCoeff());
  return inst;
}

// Classical Lloyd: nearest center (ties low), plain means.
std::vector<Labels> classical_lloyd(const Mat& a, Mat centers, int iterations) {
  std::vector<Labels> traj;
  for (int t = 0; t < iterations; ++t) {
    Labels lab(std::size_t(a.cols()));
    for (Index j = 0; j < a.cols(); ++j) {
      Index best = 0;
      for (Index r = 1; r < centers.cols(); ++r)
        if ((a.col(j) - centers.col(r)).squaredNorm() < (a.col(j) - centers.col(best)).squaredNorm()) best = r;
      lab[std::size_t(j)] = best;
    }
    traj.push_back(lab);
    for (Index r = 0; r < centers.cols(); ++r) {
      Vec s = Vec::Zero(a.rows());
      int c = 0;
      for (Index j = 0; j < a.cols(); ++j)
        if (lab[std::size_t(j)] == r) s += a.col(j), ++c;
      if (c) centers.col(r) = s / c;
    }
  }
  return traj;
}

}  // namespace

TEST(Alpha, Formula) {
  EXPECT_NEAR(cluster_alpha(2.0, 0.05, 0.1, 1.0), (1 + 1.0) * std::pow(11.0, 2.0 / 3.0), 1e-12);
  const double d = stable_separation(20.0, 3, std::sqrt(6.0), 0.1 / (2 * std::sqrt(6.0)), 0.1);
  const double alpha = cluster_alpha(std::sqrt(6.0), 0.1 / (2 * std::sqrt(6.0)), 0.1, d / std::sqrt(2.0));
  EXPECT_NEAR(d, 20.0 * alpha * std::sqrt(3.0) * 0.1, 1e-6 * d);
}

TEST(Stability, TwoFarClusters) {
  Mat a(3, 10);
  Labels lab;
  for (Index j = 0; j < 10; ++j) {
    const double sgn = j < 5 ? 1.0 : -1.0;
    a.col(j) = sgn * 10.0 * Vec::Unit(3, 0);
    a(1, j) = 0.01 * double(j % 5 - 2);
    lab.push_back(j < 5 ? 0 : 1);
  }
  const ClusterInstance inst = hand_instance(a, lab, 2, 0.1);
  const StabilityReport r1 = stability_margin(inst, 1.0);
  // Points lie on the line through the centers' orthogonal complement: margin 20.
  EXPECT_NEAR(r1.realized(0, 1), 20.0, 1e-12);
  const double base = inst.alpha * 0.1 * std::sqrt(2.0) * 2.0 * std::sqrt(10.0 / 5.0);
  EXPECT_NEAR(r1.required(0, 1), base, 1e-9 * base);
  EXPECT_NEAR(r1.max_c(0, 1), 20.0 / base, 1e-9);
  EXPECT_TRUE(stability_margin(inst, 0.99 * r1.max_c(0, 1)).all_stable);
  EXPECT_FALSE(stability_margin(inst, 1.01 * r1.max_c(0, 1)).all_stable);
}

TEST(Stability, SingleClusterAndOverlap) {
  const Mat a = oracle::gaussian(3, 8, 1);
  const ClusterInstance one = hand_instance(a, Labels(8, 0), 1, 0.5);
  EXPECT_TRUE(stability_margin(one, 100.0).all_stable);

  Labels mixed;
  for (Index j = 0; j < 8; ++j) mixed.push_back(j % 2);
  const ClusterInstance overlap = hand_instance(a, mixed, 2, 0.5);
  const StabilityReport r = stability_margin(overlap, 1.0);
  EXPECT_LT(r.realized.minCoeff(), 0.0);
  EXPECT_FALSE(r.all_stable);

  ClusterInstance empty = overlap;
  empty.labels.assign(8, 0);
  try {
    stability_margin(empty, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyCluster);
  }
}

TEST(Misclassification, Examples) {
  Labels truth(100);
  for (std::size_t j = 0; j < 100; ++j) truth[j] = Index(j % 3);
  EXPECT_EQ(misclassification(truth, truth), 0.0);
  Labels swapped = truth;
  for (auto& l : swapped) l = (l + 1) % 3;
  EXPECT_EQ(misclassification(swapped, truth), 0.0);
  const auto perm = best_label_matching(swapped, truth, 3);
  for (Index r = 0; r < 3; ++r) EXPECT_EQ(perm[std::size_t((r + 1) % 3)], r);
  Labels moved = truth;
  moved[0] = 1;
  EXPECT_NEAR(misclassification(moved, truth), 0.01, 1e-15);
  try {
    misclassification(Labels(3, 0), Labels(4, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::KMismatch);
  }
}

TEST(KMeans, SeparatedBlobs) {
  Mat pts(2, 60);
  const Mat c = (Mat(2, 3) << 0, 10, 0, 0, 0, 10).finished();
  const Mat g = oracle::gaussian(2, 60, 2) * 0.3;
  Labels truth;
  for (Index j = 0; j < 60; ++j) {
    pts.col(j) = c.col(j % 3) + g.col(j);
    truth.push_back(j % 3);
  }
  const KMeansResult km = kmeans(pts, 3, 5, 7);
  EXPECT_EQ(misclassification(km.labels, truth), 0.0);
  EXPECT_TRUE(kmeans(pts, 3, 5, 7).labels == km.labels);
  double cost = 0.0;
  for (Index j = 0; j < 60; ++j) cost += (pts.col(j) - km.centers.col(km.labels[std::size_t(j)])).squaredNorm();
  EXPECT_NEAR(cost, km.cost, 1e-9 * cost);
  EXPECT_THROW(kmeans(pts.leftCols(2), 3, 5, 7), Error);
}

TEST(AssignNearest, TiesGoLow) {
  const Mat centers = (Mat(1, 2) << -1, 1).finished();
  const Mat pts = (Mat(1, 3) << 0, -2, 2).finished();
  EXPECT_EQ(assign_nearest(pts, centers), (Labels{0, 0, 1}));
}

TEST(Generator, MixtureInvariants) {
  const double sigma = 0.1;
  const ClusterInstance inst = make_gaussian_mixture(20, 3, 300, sigma, 5.0, 2, 0.01, 4);
  check_cluster_instance(inst);
  EXPECT_NEAR(inst.kappa, std::sqrt(6.0), 1e-12);
  EXPECT_LE(oracle::spectral(inst.A.mat() - [&] {
              Mat c(20, 300);
              for (Index j = 0; j < 300; ++j) c.col(j) = inst.centers.col(inst.labels[std::size_t(j)]);
              return c;
            }()),
            sigma * std::sqrt(300.0) * (1 + 1e-9));
  ClusterInstance broken = inst;
  broken.alpha *= 2.0;
  EXPECT_THROW(check_cluster_instance(broken), Error);
}

TEST(LloydInit, TwoMixtureCentersClose) {
  const double sigma = 0.1;
  const ClusterInstance inst = make_gaussian_mixture(20, 2, 400, sigma, 8.0, 2, 0.0, 5);
  const auto init = lloyd_init(inst.A, 2, inst.kappa, sigma, kInf, SolveParams{});
  ASSERT_TRUE(init.solved());
  const Mat& c = init.value().centers;
  for (Index t = 0; t < 2; ++t) {
    const double d = std::min((c.col(0) - inst.centers.col(t)).norm(), (c.col(1) - inst.centers.col(t)).norm());
    EXPECT_LE(d, 0.5 * sigma * std::sqrt(2.0));
  }
}

TEST(LloydInit, SingleClusterIsProjectedMean) {
  const double sigma = 0.1;
  const ClusterInstance inst = make_gaussian_mixture(10, 1, 100, sigma, 4.0, 2, 0.0, 6);
  const auto init = lloyd_init(inst.A, 1, inst.kappa, sigma, kInf, SolveParams{});
  ASSERT_TRUE(init.solved());
  const Projection& p = init.value().projection;
  EXPECT_LE((init.value().centers.col(0) - p.apply(Vec(inst.A.mat().rowwise().mean()))).norm(), 1e-9);
}

TEST(LloydInit, DenseShiftIsBadInput) {
  const double sigma = 0.05;
  const ClusterInstance inst = make_gaussian_mixture(40, 2, 200, sigma, 3.0, 2, 0.0, 7);
  CorruptionSpec cs;
  cs.delta = 30.0 * sigma / inst.kappa;
  cs.strategy = CorruptionStrategy::SignShiftTowardDense;
  const auto init = lloyd_init(corrupt_instance(inst.A, cs, 0), 2, inst.kappa, sigma, kInf, SolveParams{});
  EXPECT_FALSE(init.solved());
}

TEST(CenterImprove, ExactStaysAndPerturbedImproves) {
  const double sigma = 0.1, sep = 8.0;
  const ClusterInstance inst = make_gaussian_mixture(20, 3, 600, sigma, sep, 2, 0.0, 8);
  const Projection p = Projection::from_orthonormal(Eigen::HouseholderQR<Mat>(inst.centers).householderQ() *
                                                    Mat::Identity(20, 3));
  const ImprovedCenters same = center_improve(inst.A, p, inst.centers);
  EXPECT_LE((same.centers - inst.centers).colwise().norm().maxCoeff(), sigma);

  const Mat off = inst.centers + 0.3 * sep * oracle::random_basis(20, 3, 9) * Mat::Identity(3, 3) / std::sqrt(2.0);
  const ImprovedCenters better = center_improve(inst.A, p, off);
  for (Index r = 0; r < 3; ++r) {
    if (better.kept[std::size_t(r)]) continue;
    EXPECT_LT((better.centers.col(r) - inst.centers.col(r)).norm(), (off.col(r) - inst.centers.col(r)).norm());
  }

  const ClusterInstance one = make_gaussian_mixture(10, 1, 50, sigma, 2.0, 2, 0.0, 10);
  const Projection q = orthonormalize(Mat(one.centers));
  const ImprovedCenters k1 = center_improve(one.A, q, Mat::Zero(10, 1));
  EXPECT_LE((k1.centers.col(0) - q.apply(Vec(one.A.mat().rowwise().mean()))).norm(), 1e-9);
}

TEST(RobustLloyd, TriviallySeparatedExact) {
  const double sigma = 0.1;
  const ClusterInstance inst = make_gaussian_mixture(12, 3, 300, sigma, 20.0, 2, 0.0, 11);
  const auto res = robust_lloyd(inst.A, 3, inst.kappa, sigma, kInf, 5, SolveParams{});
  ASSERT_TRUE(res.solved());
  EXPECT_EQ(misclassification(res.value().assignment, inst.labels), 0.0);
  EXPECT_EQ(res.value().trajectory.size(), 5u);
  EXPECT_EQ(res.value().center_history.size(), 5u);
  const auto perm = best_label_matching(res.value().assignment, inst.labels, 3);
  for (Index r = 0; r < 3; ++r)
    EXPECT_LE((res.value().centers.col(r) - inst.centers.col(perm[std::size_t(r)])).norm(), sigma);
}

TEST(RobustLloyd, PoisonedIsBadInput) {
  const double sigma = 0.05;
  const ClusterInstance inst = make_gaussian_mixture(40, 2, 200, sigma, 3.0, 2, 0.0, 12);
  CorruptionSpec cs;
  cs.delta = 30.0 * sigma / inst.kappa;
  cs.strategy = CorruptionStrategy::SignShiftTowardDense;
  const auto res = robust_lloyd(corrupt_instance(inst.A, cs, 0), 2, inst.kappa, sigma, kInf, 5, SolveParams{});
  ASSERT_FALSE(res.solved());
  EXPECT_GT(res.bad_input().residual, res.bad_input().tau);
}

TEST(RobustLloyd, VacuousBudgetMatchesClassicalLloyd) {
  const double sigma = 0.2;
  for (int s = 0; s < 3; ++s) {
    const Index n = 8;
    const ClusterInstance inst = make_gaussian_mixture(n, 2, 120, sigma, 3.0, 2, 0.0, 20 + s);
    const auto res = robust_lloyd(inst.A, 2, std::sqrt(double(n)), sigma, kInf, 6, SolveParams{});
    ASSERT_TRUE(res.solved());
    const auto ref = classical_lloyd(inst.A.mat(), res.value().improved_centers, 6);
    for (std::size_t t = 0; t < ref.size(); ++t) EXPECT_EQ(res.value().trajectory[t], ref[t]) << "iteration " << t;
  }
}

TEST(RobustLloyd, CenterErrorNonIncreasing) {
  const double sigma = 0.1;
  const ClusterInstance inst = make_gaussian_mixture(20, 3, 600, sigma, 6.0, 2, 0.0, 30);
  const auto res = robust_lloyd(inst.A, 3, inst.kappa, sigma, kInf, 6, SolveParams{});
  ASSERT_TRUE(res.solved());
  const auto perm = best_label_matching(res.value().assignment, inst.labels, 3);
  auto err = [&](const Mat& c) {
    double e = 0.0;
    for (Index r = 0; r < 3; ++r) e = std::max(e, (c.col(r) - inst.centers.col(perm[std::size_t(r)])).norm());
    return e;
  };
  const double floor = sigma;
  double prev = err(res.value().improved_centers);
  for (const Mat& c : res.value().center_history) {
    const double e = err(c);
    if (prev > floor) EXPECT_LE(e, 1.1 * prev);
    prev = e;
  }
}
