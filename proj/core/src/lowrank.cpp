#include "robsub/lowrank.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "robsub/error.hpp"
#include "robsub/linalg.hpp"

namespace robsub {

namespace {

Projection select_columns(const Mat& vectors, const std::vector<Index>& idx) {
  Mat b(vectors.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) b.col(static_cast<Index>(j)) = vectors.col(idx[j]);
  return Projection::from_orthonormal(std::move(b));
}

void attach_norm(PcaResult& res, const RobustnessBudget& budget, const SolveParams& params) {
  res.norm = certify_projection(res.projection, budget.q(), params.oracle_rounds,
                                derive_seed(params.seed, 0x9ea7ULL));
}

}  // namespace

Projection truncate_eigenvalues(const Mat& x, double threshold) {
  const SymEig e = sym_eig(symmetrize(x));
  std::vector<Index> keep;
  for (Index i = 0; i < e.values.size(); ++i)
    if (e.values(i) >= threshold) keep.push_back(i);
  return select_columns(e.vectors, keep);
}

Projection round_truncate_greedy(const PsdSolution& sol, const Mat& m, Index r, double gamma) {
  require(gamma > 0.0 && gamma <= 1.0, ErrorCode::InvalidParams, "gamma must lie in (0, 1]");
  require(m.rows() == sol.X.rows() && m.cols() == sol.X.cols(), ErrorCode::DimensionMismatch,
          "weight matrix must match X");
  require(r >= 0, ErrorCode::InvalidParams, "rank must be nonnegative");
  const double delta = 1.0 / (1.0 + gamma);
  const SymEig e = sym_eig(symmetrize(sol.X));
  std::vector<Index> keep;
  for (Index i = 0; i < e.values.size(); ++i)
    if (e.values(i) >= 1.0 - delta) keep.push_back(i);
  if (static_cast<Index>(keep.size()) > r) {
    std::vector<double> alpha(static_cast<std::size_t>(e.values.size()), 0.0);
    for (Index i : keep) {
      const Vec v = e.vectors.col(i);
      alpha[static_cast<std::size_t>(i)] = v.dot(m * v);
    }
    std::stable_sort(keep.begin(), keep.end(), [&](Index a, Index b) {
      return alpha[static_cast<std::size_t>(a)] > alpha[static_cast<std::size_t>(b)];
    });
    keep.resize(static_cast<std::size_t>(r));
  }
  return select_columns(e.vectors, keep);
}

double frobenius_error(const DataMatrix& a, const Projection& p) {
  require(p.dim() == a.n(), ErrorCode::DimensionMismatch, "projection and data differ in n");
  return (a.mat() - p.apply(a.mat())).squaredNorm();
}

double spectral_error(const DataMatrix& a, const Projection& p) {
  require(p.dim() == a.n(), ErrorCode::DimensionMismatch, "projection and data differ in n");
  return spectral_norm(a.mat() - p.apply(a.mat()));
}

NormEstimate certify_projection(const Projection& p, const Exponent& q, int rounds, std::uint64_t seed) {
  if (p.rank() == 0) {
    NormEstimate est;
    est.witness = Vec::Zero(p.dim());
    est.approx_factor = psd_oracle_factor(q);
    return est;
  }
  return q_to_qstar_psd_oracle(p.matrix(), q, rounds, seed);
}

PcaResult robust_pca_frobenius(const DataMatrix& a, Index r, const RobustnessBudget& budget,
                               const SolveParams& params) {
  PcaResult res;
  res.relaxation = solve_frobenius_relax(a, r, budget, params);
  const Mat w = a.mat() * a.mat().transpose();
  res.projection = round_truncate_greedy(res.relaxation, w, r, params.gamma);
  res.error = frobenius_error(a, res.projection);
  attach_norm(res, budget, params);
  return res;
}

PcaResult robust_pca_frobenius_bicriteria(const DataMatrix& a, Index r, const RobustnessBudget& budget,
                                          const SolveParams& params) {
  PcaResult res;
  res.relaxation = solve_frobenius_relax(a, r, budget, params);
  const double delta = 1.0 / (1.0 + params.gamma);
  res.projection = truncate_eigenvalues(res.relaxation.X, 1.0 - delta);
  res.error = frobenius_error(a, res.projection);
  attach_norm(res, budget, params);
  return res;
}

PcaResult robust_pca_spectral(const DataMatrix& a, Index r, const RobustnessBudget& budget,
                              const SolveParams& params, bool bicriteria) {
  PcaResult res;
  res.relaxation = solve_spectral_relax(a, r, budget, params);
  const double delta = 2.0 / (2.0 + params.gamma);
  Projection ps = truncate_eigenvalues(res.relaxation.X, 1.0 - delta);
  if (bicriteria || ps.rank() <= r) {
    res.projection = std::move(ps);
  } else {
    // Top-r left singular subspace of Pi_S A, inside the span of Pi_S.
    const Mat c = ps.basis().transpose() * a.mat();
    const SymEig e = sym_eig_top(symmetrize(c * c.transpose()), r);
    res.projection = Projection::from_orthonormal(ps.basis() * e.vectors);
  }
  res.error = spectral_error(a, res.projection);
  attach_norm(res, budget, params);
  return res;
}

PcaResult recover_subspace(const DataMatrix& a, Index r, const RobustnessBudget& budget,
                           const SolveParams& params, double theta) {
  require(theta > 0.0, ErrorCode::InvalidParams, "theta must be positive");
  PcaResult res = robust_pca_frobenius(a, r, budget, params);
  res.theta = theta;
  return res;
}

}  // namespace robsub
