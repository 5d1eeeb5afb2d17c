#pragma once

#include <cstdint>
#include <optional>
#include <variant>

#include "robsub/lowrank.hpp"
#include "robsub/matcore.hpp"

namespace robsub {

enum class CorruptionStrategy { SignShiftTowardDense, ShrinkSignal, IidUniform, Custom };

const char* to_string(CorruptionStrategy s);
CorruptionStrategy parse_corruption_strategy(const std::string& text);

struct CorruptionSpec {
  double delta = 0.0;  // per-column l_q budget
  Exponent q = Exponent::infinity();
  CorruptionStrategy strategy = CorruptionStrategy::IidUniform;
  std::optional<Mat> custom;  // perturbation for Custom, one column per sample

  void validate() const;
};

// Evidence for a poisoned dataset: the realized residual exceeded tau.
struct BadInput {
  double residual = 0.0;
  double tau = 0.0;
};

template <class T>
struct CertifyOutcome {
  std::variant<T, BadInput> result;

  bool solved() const noexcept { return result.index() == 0; }
  const T& value() const { return std::get<0>(result); }
  const BadInput& bad_input() const { return std::get<1>(result); }
};

struct SpectralCertified {
  PcaResult pca;
  double residual = 0.0;  // ||A~ - P A~||_spec
};

// Max over columns of ||X_j - Y_j||_q.
double max_column_distance(const Mat& X, const Mat& Y, const Exponent& q);

DataMatrix corrupt_instance(const DataMatrix& A, const CorruptionSpec& spec, std::uint64_t seed);

// argmin ||B||_F^2 over ||B_j - A~_j||_q <= delta.
DataMatrix shrink_gamma_q(const DataMatrix& A_tilde, double delta, const Exponent& q);

PcaResult robust_pca_frobenius_poisoned(const DataMatrix& A_tilde, double delta, Index r,
                                        const RobustnessBudget& budget, const SolveParams& params);

CertifyOutcome<SpectralCertified> certify_or_project_spectral(const DataMatrix& A_tilde, double tau, Index r,
                                                               const RobustnessBudget& budget,
                                                               const SolveParams& params);

struct Displacement {
  double lower = 0.0;  // achieved by witness
  double upper = 0.0;
  Vec witness;         // ||witness||_q <= delta
};

// Bounds on sup ||P z||_2 over ||z||_q <= delta.
Displacement adversarial_displacement(const Projection& P, double delta, const Exponent& q,
                                      int rounds = 100, std::uint64_t seed = 0);

struct TightnessInstance {
  DataMatrix A{Mat::Zero(1, 1)};
  DataMatrix A_prime{Mat::Zero(1, 1)};
  Projection P_star{1};   // v v^T, v uniform on k coordinates
  Projection P_prime{1};  // u u^T for the sparser perturbation u
  Index support = 0;      // k
  Index ell = 0;
  double residual = 0.0;  // ||A - P' A||_F
  double ratio = 0.0;     // residual / (delta kappa sqrt(m))
};

// Two rank-1 instances within 10 delta (l_inf) where the more robust
// projection of A' loses Omega(delta kappa sqrt(m)) on A.
TightnessInstance additive_tightness_instance(double kappa, double delta, Index m, Index n);

}  // namespace robsub
