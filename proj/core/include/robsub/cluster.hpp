#pragma once

#include <cstdint>
#include <vector>

#include "robsub/matcore.hpp"
#include "robsub/meanest.hpp"
#include "robsub/poisoning.hpp"
#include "robsub/sdpsolve.hpp"

namespace robsub {

using Labels = std::vector<Index>;

struct ClusterInstance {
  DataMatrix A{Mat::Zero(1, 1)};
  Labels labels;   // ground truth, test only
  Mat centers;     // n x k label-wise means
  double sigma = 0.0;  // ||A - C||_spec <= sigma sqrt(m)
  Index k = 0;
  double kappa = 0.0;
  double delta = 0.0;
  double alpha = 0.0;  // (1 + kappa delta / sigma) (1 + mu_max / sigma)^(2/3)
};

double cluster_alpha(double kappa, double delta, double sigma, double mu_max);

// Pairwise distance D with D = c alpha(D) sqrt(k) sigma when the centers have
// norm D / sqrt(2), as for make_gaussian_mixture.
double stable_separation(double c, Index k, double kappa, double delta, double sigma);

// Equal-weight mixture with centers (D / sqrt(2)) u_r for orthonormal u_r on
// disjoint supports of size s (entries +-1/sqrt(s)), so kappa = sqrt(k s).
// Noise is Gaussian, centered per cluster and capped so the sigma bound holds.
ClusterInstance make_gaussian_mixture(Index n, Index k, Index m, double sigma, double separation,
                                      Index support, double delta, std::uint64_t seed);

// Throws InvalidParams when a stored field disagrees with the data.
void check_cluster_instance(const ClusterInstance& inst);

struct StabilityReport {
  Mat required;  // Delta_{r,s}
  Mat realized;  // worst margin over points of cluster r against s
  Mat max_c;     // realized / Delta_{r,s} at c = 1
  std::vector<std::vector<bool>> stable;
  bool all_stable = true;
};

StabilityReport stability_margin(const ClusterInstance& inst, double c);

struct KMeansResult {
  Mat centers;  // d x k
  Labels labels;
  double cost = 0.0;
};

// k-means++ seeding and Lloyd refinement, best of the restarts.
KMeansResult kmeans(const Mat& points, Index k, int restarts, std::uint64_t seed, int max_iterations = 300);

// Nearest center, ties to the lower index.
Labels assign_nearest(const Mat& points, const Mat& centers);

struct ClusterInit {
  Mat centers;  // n x k
  Projection projection{0};
  SpectralCertified certificate;
};

// tau = 2 sigma sqrt(m), r = k; k-means on the projected points.
CertifyOutcome<ClusterInit> lloyd_init(const DataMatrix& A_tilde, Index k, double kappa, double sigma,
                                       const Exponent& q, const SolveParams& params);

struct ImprovedCenters {
  Mat centers;
  std::vector<bool> kept;  // S_r was empty and the previous center was kept
};

// Means of the sets {P a : |P a - nu_r| <= |P a - nu_s| / 3 for all s != r}.
ImprovedCenters center_improve(const DataMatrix& A_tilde, const Projection& P, const Mat& centers);

struct LloydResult {
  Mat centers;
  Labels assignment;
  Mat initial_centers;
  Mat improved_centers;
  Projection projection{0};
  std::vector<Labels> trajectory;  // assignment at every iteration
  std::vector<Mat> center_history;
  int empty_updates = 0;
};

CertifyOutcome<LloydResult> robust_lloyd(const DataMatrix& A_tilde, Index k, double kappa, double sigma,
                                         const Exponent& q, int iterations, const SolveParams& params);

// Min over label bijections of the fraction of points whose label differs.
double misclassification(const Labels& assignment, const Labels& truth);
// Best bijection from estimated to true labels, perm[est] = truth.
std::vector<Index> best_label_matching(const Labels& assignment, const Labels& truth, Index k);

}  // namespace robsub
