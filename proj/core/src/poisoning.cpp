#include "robsub/poisoning.hpp"

#include <cmath>
#include <random>
#include <string>

#include "robsub/error.hpp"
#include "robsub/linalg.hpp"
#include "robsub/opnorms.hpp"
#include "robsub/sdpsolve.hpp"

namespace robsub {

const char* to_string(CorruptionStrategy s) {
  switch (s) {
    case CorruptionStrategy::SignShiftTowardDense: return "sign-shift";
    case CorruptionStrategy::ShrinkSignal: return "shrink-signal";
    case CorruptionStrategy::IidUniform: return "iid-uniform";
    case CorruptionStrategy::Custom: return "custom";
  }
  return "?";
}

CorruptionStrategy parse_corruption_strategy(const std::string& text) {
  if (text == "sign-shift") return CorruptionStrategy::SignShiftTowardDense;
  if (text == "shrink-signal") return CorruptionStrategy::ShrinkSignal;
  if (text == "iid-uniform") return CorruptionStrategy::IidUniform;
  if (text == "custom") return CorruptionStrategy::Custom;
  fail(ErrorCode::ConfigError, "unknown corruption strategy '" + text + "'");
}

void CorruptionSpec::validate() const {
  require(delta >= 0.0 && std::isfinite(delta), ErrorCode::InvalidParams, "delta must be >= 0");
  require(strategy != CorruptionStrategy::Custom || custom.has_value(), ErrorCode::InvalidParams,
          "custom corruption needs a perturbation matrix");
}

double max_column_distance(const Mat& x, const Mat& y, const Exponent& q) {
  require(x.rows() == y.rows() && x.cols() == y.cols(), ErrorCode::DimensionMismatch,
          "matrices differ in shape");
  double d = 0.0;
  for (Index j = 0; j < x.cols(); ++j) d = std::max(d, vector_norm(x.col(j) - y.col(j), q));
  return d;
}

namespace {

// l_q norm of the all-ones vector of length n.
double ones_norm(Index n, const Exponent& q) {
  return q.is_infinite() ? 1.0 : std::pow(static_cast<double>(n), 1.0 / q.value());
}

}  // namespace

DataMatrix corrupt_instance(const DataMatrix& a, const CorruptionSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Index n = a.n();
  const Index m = a.m();
  const double delta = spec.delta;
  const Exponent& q = spec.q;
  Mat z = Mat::Zero(n, m);

  switch (spec.strategy) {
    case CorruptionStrategy::SignShiftTowardDense: {
      // Signs of the top left singular vector; zero coordinates get +1.
      const SymEig e = sym_eig_top(symmetrize(a.mat() * a.mat().transpose()), 1);
      Vec s(n);
      for (Index i = 0; i < n; ++i) s(i) = e.vectors(i, 0) < -1e-12 ? -1.0 : 1.0;
      const Vec shift = s * (delta / ones_norm(n, q));
      z = shift.replicate(1, m);
      break;
    }
    case CorruptionStrategy::ShrinkSignal: {
      if (q.is_infinite()) {
        z = a.mat().unaryExpr([delta](double v) {
          return v > 0.0 ? -std::min(v, delta) : std::min(-v, delta);
        });
      } else {
        for (Index j = 0; j < m; ++j) {
          const double nj = vector_norm(a.col(j), q);
          if (nj > 0.0) z.col(j) = -a.col(j) * std::min(1.0, delta / nj);
        }
      }
      break;
    }
    case CorruptionStrategy::IidUniform: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      std::uniform_real_distribution<double> radius(0.0, 1.0);
      for (Index j = 0; j < m; ++j) {
        for (Index i = 0; i < n; ++i) z(i, j) = u(rng);
        if (q.is_infinite()) {
          z.col(j) *= delta;
        } else {
          const double nz = vector_norm(z.col(j), q);
          const double rad = radius(rng);
          z.col(j) *= nz > 0.0 ? delta * rad / nz : 0.0;
        }
      }
      break;
    }
    case CorruptionStrategy::Custom: {
      z = *spec.custom;
      require(z.rows() == n && z.cols() == m, ErrorCode::DimensionMismatch,
              "custom perturbation must match the data shape");
      require_finite(z, "custom perturbation");
      for (Index j = 0; j < m; ++j)
        require(vector_norm(z.col(j), q) <= delta * (1.0 + 1e-12), ErrorCode::InvalidParams,
                "custom perturbation exceeds the per-column budget");
      break;
    }
  }

  Mat out = a.mat() + z;
  const double realized = max_column_distance(out, a.mat(), q);
  require(realized <= delta * (1.0 + 1e-9) + 1e-15, ErrorCode::SolverFailure,
          "generated corruption exceeds its budget");
  return DataMatrix(std::move(out));
}

DataMatrix shrink_gamma_q(const DataMatrix& a, double delta, const Exponent& q) {
  require(delta >= 0.0 && std::isfinite(delta), ErrorCode::InvalidParams, "delta must be >= 0");
  if (delta == 0.0) return a;
  if (q.is_infinite()) {
    return DataMatrix(a.mat().unaryExpr([delta](double v) {
      return v > delta ? v - delta : (v < -delta ? v + delta : 0.0);
    }));
  }
  Mat b = a.mat();
  for (Index j = 0; j < b.cols(); ++j) {
    // The best move z stays in the l_q ball; it is the projection of b_j onto it.
    const Mat col = a.mat().col(j);
    b.col(j) = col - project_entrywise_ball(col, q, delta);
  }
  return DataMatrix(std::move(b));
}

PcaResult robust_pca_frobenius_poisoned(const DataMatrix& a_tilde, double delta, Index r,
                                        const RobustnessBudget& budget, const SolveParams& params) {
  const DataMatrix shrunk = shrink_gamma_q(a_tilde, delta, budget.q());
  return robust_pca_frobenius(shrunk, r, budget, params);
}

CertifyOutcome<SpectralCertified> certify_or_project_spectral(const DataMatrix& a_tilde, double tau, Index r,
                                                               const RobustnessBudget& budget,
                                                               const SolveParams& params) {
  require(tau > 0.0 && std::isfinite(tau), ErrorCode::InvalidParams, "tau must be positive");
  SpectralCertified out;
  out.pca = robust_pca_spectral(a_tilde, r, budget, params);
  out.residual = out.pca.error;
  if (out.residual <= tau) return {std::move(out)};
  return {BadInput{out.residual, tau}};
}

Displacement adversarial_displacement(const Projection& p, double delta, const Exponent& q, int rounds,
                                      std::uint64_t seed) {
  require(delta >= 0.0 && std::isfinite(delta), ErrorCode::InvalidParams, "delta must be >= 0");
  const NormEstimate est = certify_projection(p, q, rounds, seed);
  Displacement d;
  d.lower = delta * std::sqrt(est.lower_bound);
  d.upper = delta * std::sqrt(est.upper_bound);
  d.witness = delta * est.witness;
  return d;
}

TightnessInstance additive_tightness_instance(double kappa, double delta, Index m, Index n) {
  require(kappa >= 2.0 && std::isfinite(kappa), ErrorCode::InvalidParams, "kappa must be >= 2");
  require(m >= 1 && n >= 1, ErrorCode::InvalidParams, "m and n must be positive");
  require(delta >= 0.0, ErrorCode::InvalidParams, "delta must be >= 0");
  const auto k = static_cast<Index>(std::ceil(kappa * kappa - 1e-12));
  require(k <= n, ErrorCode::InvalidParams, "support ceil(kappa^2) does not fit in n");
  const Index ell = k / 2;
  const double vi = 1.0 / std::sqrt(static_cast<double>(k));
  require(ell >= kappa * kappa / 2.0 - 1.0, ErrorCode::InvalidParams, "support arithmetic fails");
  require(delta <= vi, ErrorCode::InvalidParams, "delta must not exceed |v_{2l}| = 1/sqrt(k)");

  Vec v = Vec::Zero(n);
  v.head(k).setConstant(vi);
  Vec u = v;
  u.head(ell).array() += delta;
  u.segment(ell, ell).array() -= delta;
  const Vec ubar = u / u.norm();

  TightnessInstance t;
  t.A = DataMatrix(v.replicate(1, m));
  t.A_prime = DataMatrix(u.replicate(1, m));
  t.P_star = Projection::from_orthonormal(Mat(v));
  t.P_prime = Projection::from_orthonormal(Mat(ubar));
  t.support = k;
  t.ell = ell;
  t.residual = std::sqrt(frobenius_error(t.A, t.P_prime));
  t.ratio = t.residual / (delta * kappa * std::sqrt(static_cast<double>(m)));
  if (delta == 0.0) t.ratio = 0.0;
  return t;
}

}  // namespace robsub
