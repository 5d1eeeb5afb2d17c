#pragma once

#include <cstdint>
#include <optional>

#include "robsub/matcore.hpp"

namespace robsub {

struct SolveParams {
  double tol_objective = 1e-4;  // relative to ||A||_F^2
  double tol_feasibility = 1e-6;
  int max_iterations = 5000;
  double gamma = 1.0;  // rounding slack, (0, 1]
  double eta = 0.1;    // poisoning slack
  double tau = 0.0;    // certification threshold
  std::uint64_t seed = 0;
  int oracle_rounds = 100;

  void validate() const;
};

enum class SolverBackend { Production, Ellipsoid };

struct PsdSolution {
  Mat X;
  double objective = 0.0;
  double norm_certificate = 0.0;  // certified ||X||_{q -> q*}
  std::optional<double> entrywise_certificate;
  std::optional<double> lambda;
  bool iteration_limit = false;
  int iterations = 0;
  int cuts = 0;
};

// min ||A||_F^2 - <A A^T, X>  s.t.  tr X <= r, 0 <= X <= I, ||X||_{q->q*} <= kappa^2.
PsdSolution solve_frobenius_relax(const DataMatrix& A, Index r, const RobustnessBudget& budget,
                                  const SolveParams& params,
                                  SolverBackend backend = SolverBackend::Production);

// min lambda  s.t.  A^T (I - X) A <= lambda I, plus the constraints above.
PsdSolution solve_spectral_relax(const DataMatrix& A, Index r, const RobustnessBudget& budget,
                                 const SolveParams& params,
                                 SolverBackend backend = SolverBackend::Production);

// min (||A||_F^2 - <A A^T, X>) / m  s.t.  tr X = r, 0 <= X <= I,
// ||X||_{q*}^{q*} <= r^{q*} kappa^{2 q*} (entrywise), ||X||_{q->q*} <= kappa^2.
PsdSolution solve_spiked_relax(const DataMatrix& A, Index r, const RobustnessBudget& budget,
                               const SolveParams& params,
                               SolverBackend backend = SolverBackend::Production);

// Euclidean projection onto {0 <= X <= I, tr X <= r} (or tr X = r).
Mat project_spectrahedron(const Mat& Y, double r, bool trace_equal);

// Euclidean projection onto the entrywise l_p ball of the given radius, p in [1, inf].
Mat project_entrywise_ball(const Mat& Y, const Exponent& p, double radius);

// Entrywise l_p norm of a matrix.
double entrywise_norm(const Mat& X, const Exponent& p);

}  // namespace robsub
