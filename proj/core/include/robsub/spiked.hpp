#pragma once

#include <cstdint>
#include <vector>

#include "robsub/lowrank.hpp"
#include "robsub/matcore.hpp"
#include "robsub/opnorms.hpp"
#include "robsub/sdpsolve.hpp"

namespace robsub {

struct SpikeModel {
  Index n = 0;
  Index r = 0;
  double theta_min = 0.0;
  double theta_max = 0.0;
  Mat Sigma_star;  // U diag(lambdas) U^T
  Mat U;           // n x r orthonormal
  Vec lambdas;     // descending
  Projection Pi_star{1};
  double kappa = 0.0;  // bound on ||Pi*||_{q->2}
  Exponent q = Exponent::infinity();
  double T_q = 0.0;
  std::vector<std::vector<Index>> supports;
};

// 2 sqrt(log n) when q >= log n, n^(1/q) sqrt(q) otherwise.
double gaussian_width_constant(Index n, const Exponent& q);

// r unit vectors on disjoint supports of size k with entries +-1/sqrt(k) and
// eigenvalues uniform in [theta_min, theta_max]; kappa = sqrt(r k). At n <= 20
// and q = inf the bound is checked by enumeration.
SpikeModel make_sparse_spike(Index n, Index r, Index k, double theta_min, double theta_max, std::uint64_t seed,
                             const Exponent& q = Exponent::infinity());

// Throws InvalidParams when a stored field disagrees with the others.
void check_spike_model(const SpikeModel& model);

// m columns drawn from N(0, I + Sigma*) as g0 + U diag(sqrt(lambda)) g1.
DataMatrix scm_sample(const SpikeModel& model, Index m, std::uint64_t seed);

struct SpikeDetection {
  bool yes = false;
  double statistic = 0.0;  // <A A^T / m, X>
  double threshold = 0.0;  // (1 + theta_min / 2) r
  PsdSolution relaxation;
};

SpikeDetection spike_detect_sdp(const DataMatrix& A, Index r, double kappa, const Exponent& q, double theta_min,
                                const SolveParams& params);

struct SpikeRecovery {
  Projection projection{1};
  Mat Sigma_hat;  // P (A A^T / m) P - P, clipped to PSD
  PsdSolution relaxation;
  NormEstimate norm;  // q -> q* estimate of the projection
  double certified_q_to_2() const { return std::sqrt(norm.upper_bound); }
};

SpikeRecovery spike_recover_sdp(const DataMatrix& A, Index r, double kappa, const Exponent& q,
                                const SolveParams& params);

struct BruteSpike {
  Projection projection{1};
  std::vector<Index> support;
  double score = 0.0;  // ||P A||_F^2
};

// argmax ||v v^T A||_F^2 over sign vectors uniform on k coordinates; n <= 12,
// r = 1 and q = inf only.
BruteSpike spike_recover_bruteforce(const DataMatrix& A, Index r, Index k, const Exponent& q);

}  // namespace robsub
