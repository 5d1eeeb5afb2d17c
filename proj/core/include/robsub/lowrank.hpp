#pragma once

#include "robsub/matcore.hpp"
#include "robsub/opnorms.hpp"
#include "robsub/sdpsolve.hpp"

namespace robsub {

// A rounded projection with its relaxation and an oracle bound on
// ||P||_{q->q*} = ||P||_{q->2}^2.
struct PcaResult {
  Projection projection{0};
  PsdSolution relaxation;
  NormEstimate norm;  // q -> q* estimate of the projection
  double error = 0.0;  // squared Frobenius or spectral residual of the input
  double theta = 0.0;  // recorded by recover_subspace only

  // Certified ||P||_{q->2}.
  double certified_q_to_2() const { return std::sqrt(norm.upper_bound); }
};

// Keeps eigenvectors of X with eigenvalue >= 1 - delta, delta = 1/(1+gamma); if
// more than r survive, keeps the r with the largest <v v^T, M>.
Projection round_truncate_greedy(const PsdSolution& sol, const Mat& M, Index r, double gamma);

// Eigenvectors of X with eigenvalue >= threshold.
Projection truncate_eigenvalues(const Mat& X, double threshold);

double frobenius_error(const DataMatrix& A, const Projection& P);  // ||A - P A||_F^2
double spectral_error(const DataMatrix& A, const Projection& P);   // ||A - P A||_spec

NormEstimate certify_projection(const Projection& P, const Exponent& q, int rounds = 100,
                                std::uint64_t seed = 0);

PcaResult robust_pca_frobenius(const DataMatrix& A, Index r, const RobustnessBudget& budget,
                               const SolveParams& params);
// Rank <= r (1 + 1/gamma).
PcaResult robust_pca_frobenius_bicriteria(const DataMatrix& A, Index r, const RobustnessBudget& budget,
                                          const SolveParams& params);
// Rank <= r, or <= (1 + 2/gamma) r with bicriteria.
PcaResult robust_pca_spectral(const DataMatrix& A, Index r, const RobustnessBudget& budget,
                              const SolveParams& params, bool bicriteria = false);
// Runs the Frobenius algorithm; theta = sigma_r of the planted part, kept for reporting.
PcaResult recover_subspace(const DataMatrix& A, Index r, const RobustnessBudget& budget,
                           const SolveParams& params, double theta);

}  // namespace robsub
