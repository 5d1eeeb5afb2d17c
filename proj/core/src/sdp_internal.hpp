#pragma once

#include "robsub/matcore.hpp"
#include "robsub/sdpsolve.hpp"

namespace robsub::detail {

enum class ProgramKind { Frobenius, Spectral, Spiked };

// One of the three relaxations, with the data scaled so that lambda_max(W) = 1.
struct Program {
  ProgramKind kind = ProgramKind::Frobenius;
  Index n = 0;
  Index r = 0;
  bool trace_equal = false;
  double fro2 = 0.0;   // ||A||_F^2
  double m = 1.0;
  double scale = 0.0;  // ||A||_spec^2; zero for A = 0
  Mat W;               // A A^T / scale
  Mat L;               // L L^T = W
  Exponent q = Exponent::infinity();
  double kappa2 = 1.0;
  double factor = 1.0;  // C_G(q)
  bool entrywise = false;
  Exponent qs = Exponent(1.0);
  double ent_radius = 0.0;  // bound on the entrywise q*-norm of X

  // The unscaled objective at a feasible X.
  double objective(const Mat& X) const;
  // lambda_max(L^T (I - X) L), scaled.
  double spectral_value(const Mat& X) const;
};

Program make_program(ProgramKind kind, const DataMatrix& A, Index r,
                     const RobustnessBudget& budget);

// Feasible starting point: 0, or (r/n) I for the trace equality.
Mat initial_point(const Program& p);

// Repairs X into the feasible set, certifies the norm and fills in the report.
PsdSolution finalize(const Program& p, Mat X, const SolveParams& params);

PsdSolution solve_production(const Program& p, const SolveParams& params);
PsdSolution solve_ellipsoid(const Program& p, const SolveParams& params);

}  // namespace robsub::detail
