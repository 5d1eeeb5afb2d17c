#pragma once

#include <cstdint>

#include "robsub/matcore.hpp"

namespace robsub {

struct NormEstimate {
  double lower_bound = 0.0;
  Vec witness;               // achieves lower_bound, unit l_q norm (or zero)
  double upper_bound = 0.0;  // dual certificate
  double approx_factor = 1.0;
};

struct SeparationResult {
  enum class Kind { Certified, Hyperplane };
  Kind kind = Kind::Certified;
  double bound = 0.0;  // Certified: certified norm bound
  Mat Z;               // Hyperplane: (x y^T + y x^T) / 2
  Vec x, y;
  double rhs = 0.0;
  double value = 0.0;  // <X, Z> for the tested X

  bool certified() const noexcept { return kind == Kind::Certified; }
};

double vector_norm(const Vec& v, const Exponent& q);

// gamma_r = (E|g|^r)^(1/r), g ~ N(0,1), by quadrature.
double gaussian_moment_gamma(double r);
// Guaranteed ratio for the PSD q -> q* oracle: pi/2 at q = inf, 1/gamma_{q*}^2 otherwise.
double psd_oracle_factor(const Exponent& q);

// Exact for q = inf (all sign vectors, at most 20 columns); a grid + ascent
// lower bound for finite q.
double exact_q_to_2_bruteforce(const Mat& M, const Exponent& q, int grid_budget = 4000);
// max over x in {-1,1}^n of x^T B x, n <= 20.
double exact_inf_to_1_bruteforce(const Mat& B, Vec* argmax = nullptr);

NormEstimate q_to_qstar_psd_oracle(const Mat& B, const Exponent& q, int rounds = 100,
                                   std::uint64_t seed = 0);
NormEstimate q_to_2_lower_bound(const Mat& M, const Exponent& q, int rounds = 100,
                                std::uint64_t seed = 0);

// rhs is kappa^2 for the q -> q* constraint.
SeparationResult norm_separation_oracle(const Mat& X, const RobustnessBudget& budget, double rhs,
                                        int rounds = 100, std::uint64_t seed = 0);

// Eigenvalues below -1e-6 ||B|| raise NotPSD; the rest are clipped to zero.
Mat clip_psd(const Mat& B);

// Cheap search for a violating witness of x^T B x > rhs before the full
// oracle runs. Returns the best witness found (unit l_q norm) and its value.
double heuristic_witness(const Mat& B, const Exponent& q, Vec& witness);
// Same search started from the given candidate directions (columns).
double heuristic_witness(const Mat& B, const Exponent& q, const Mat& candidates, Vec& witness);

}  // namespace robsub
