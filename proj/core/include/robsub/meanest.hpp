#pragma once

#include <cstdint>

#include "robsub/matcore.hpp"
#include "robsub/poisoning.hpp"
#include "robsub/sdpsolve.hpp"

namespace robsub {

// Clean data with mu = row means of A and ||A - mu 1^T||_spec <= sigma sqrt(m).
struct MeanInstance {
  DataMatrix A{Mat::Zero(1, 1)};
  Vec mu;
  double sigma = 0.0;
  double kappa = 0.0;  // ||mu / |mu| ||_{q*} = ||mu mu^T / |mu|^2||_{q->2}
  Exponent q = Exponent::infinity();
};

// k-sparse unit mean with random signs plus Gaussian noise. The noise is row
// centered and scaled down when needed so the sigma bound holds exactly.
MeanInstance make_sparse_mean_instance(Index n, Index k, double sigma, Index m, const Exponent& q,
                                       std::uint64_t seed);
// Throws InvalidParams when a stored field disagrees with the data.
void check_mean_instance(const MeanInstance& inst);

struct MeanEstimate {
  Vec mu_hat;
  SpectralCertified certificate;
};

// tau = 2 sigma sqrt(m), r = 1. With project=false the plain mean of A~ is
// returned after certification.
CertifyOutcome<MeanEstimate> robust_mean(const DataMatrix& A_tilde, double kappa, double sigma,
                                         const Exponent& q, const SolveParams& params,
                                         bool project = true);

// ||A~ - mean 1^T||_spec / sqrt(m). Exploratory only: it is not a valid bound
// for corrupted data.
double estimate_sigma(const DataMatrix& A_tilde);

struct MeanLbInstance {
  DataMatrix A{Mat::Zero(1, 1)};
  DataMatrix A_tilde{Mat::Zero(1, 1)};
  Vec mu1;
  Vec mu2;
  double kappa = 0.0;  // 2 sqrt(k)
  double delta = 0.0;  // sqrt(k) / n
  double sigma = 0.0;
  Index k = 0;         // 3 sigma n
  double separation = 0.0;  // |mu1 - mu2| = sqrt(3 sigma)
};

// Two datasets within delta (l_inf) per column whose means are sqrt(3 sigma)
// apart, both with the same robustness and variance bounds.
MeanLbInstance mean_lb_instance(Index n, double sigma, Index m, std::uint64_t seed);

struct ExhaustiveMean {
  Vec mu_hat;
  Vec direction;
  double objective = 0.0;  // ||A' - v v^T A'||_spec at the returned pair
  int evaluated = 0;
};

// Searches rank-1 projections v v^T with ||v||_{q*} <= kappa and A' within
// delta of A~ for the smallest ||A' - v v^T A'||_spec; returns mean(v v^T A').
// Enumerates supports when n <= 12 and q = inf, local search otherwise.
ExhaustiveMean robust_mean_exhaustive(const DataMatrix& A_tilde, double kappa, double delta,
                                      const Exponent& q, int budget = 8192);

}  // namespace robsub
