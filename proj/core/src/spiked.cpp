#include "robsub/spiked.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "robsub/error.hpp"
#include "robsub/linalg.hpp"

namespace robsub {

double gaussian_width_constant(Index n, const Exponent& q) {
  require(n >= 2, ErrorCode::InvalidParams, "n must be at least 2");
  const double ln = std::log(static_cast<double>(n));
  if (q.is_infinite() || q.value() >= ln) return 2.0 * std::sqrt(ln);
  return std::pow(static_cast<double>(n), 1.0 / q.value()) * std::sqrt(q.value());
}

SpikeModel make_sparse_spike(Index n, Index r, Index k, double theta_min, double theta_max, std::uint64_t seed,
                             const Exponent& q) {
  require(n >= 2 && r >= 1 && k >= 1, ErrorCode::InvalidParams, "n >= 2, r >= 1 and k >= 1 required");
  require(r * k <= n, ErrorCode::InvalidParams, "r k must not exceed n");
  require(theta_min >= 0.0 && theta_max >= theta_min && std::isfinite(theta_max), ErrorCode::InvalidParams,
          "need 0 <= theta_min <= theta_max");
  std::mt19937_64 rng(seed);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  std::bernoulli_distribution coin(0.5);

  SpikeModel model;
  model.n = n;
  model.r = r;
  model.theta_min = theta_min;
  model.theta_max = theta_max;
  model.q = q;
  model.U = Mat::Zero(n, r);
  const double v = 1.0 / std::sqrt(static_cast<double>(k));
  for (Index c = 0; c < r; ++c) {
    std::vector<Index> sup(idx.begin() + c * k, idx.begin() + (c + 1) * k);
    std::sort(sup.begin(), sup.end());
    for (Index i : sup) model.U(i, c) = coin(rng) ? v : -v;
    model.supports.push_back(std::move(sup));
  }
  std::uniform_real_distribution<double> u(theta_min, theta_max);
  model.lambdas.resize(r);
  for (Index c = 0; c < r; ++c) model.lambdas(c) = theta_min == theta_max ? theta_min : u(rng);
  // Keep U ordered with the eigenvalues.
  std::vector<Index> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return model.lambdas(a) > model.lambdas(b); });
  Mat us(n, r);
  Vec ls(r);
  std::vector<std::vector<Index>> sups;
  for (Index c = 0; c < r; ++c) {
    us.col(c) = model.U.col(order[static_cast<std::size_t>(c)]);
    ls(c) = model.lambdas(order[static_cast<std::size_t>(c)]);
    sups.push_back(model.supports[static_cast<std::size_t>(order[static_cast<std::size_t>(c)])]);
  }
  model.U = std::move(us);
  model.lambdas = std::move(ls);
  model.supports = std::move(sups);
  model.Sigma_star = model.U * model.lambdas.asDiagonal() * model.U.transpose();
  model.Pi_star = Projection::from_orthonormal(model.U);
  model.kappa = std::sqrt(static_cast<double>(r * k));
  model.T_q = gaussian_width_constant(n, q);
  if (n <= 20 && q.is_infinite()) {
    const double exact = std::sqrt(exact_inf_to_1_bruteforce(model.Pi_star.matrix()));
    require(exact <= model.kappa * (1.0 + 1e-9), ErrorCode::SolverFailure, "kappa bound fails on the plant");
  }
  return model;
}

void check_spike_model(const SpikeModel& model) {
  const Mat& s = model.Sigma_star;
  require(s.rows() == model.n && s.cols() == model.n, ErrorCode::DimensionMismatch, "Sigma* has the wrong shape");
  require(model.Pi_star.rank() == model.r, ErrorCode::InvalidParams, "Pi* has the wrong rank");
  const Mat p = model.Pi_star.matrix();
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  require((p * s * p - s).cwiseAbs().maxCoeff() <= 1e-10 * scale, ErrorCode::InvalidParams,
          "Sigma* is not supported on Pi*");
  const Vec ev = sym_eig_top(s, model.r).values;
  for (Index i = 0; i < ev.size(); ++i)
    require(ev(i) >= model.theta_min - 1e-9 * scale && ev(i) <= model.theta_max + 1e-9 * scale,
            ErrorCode::InvalidParams, "eigenvalue outside [theta_min, theta_max]");
  require(model.lambdas.size() == model.r && model.U.rows() == model.n && model.U.cols() == model.r,
          ErrorCode::DimensionMismatch, "U or lambdas has the wrong shape");
  require((model.U * model.lambdas.asDiagonal() * model.U.transpose() - s).cwiseAbs().maxCoeff() <= 1e-10 * scale,
          ErrorCode::InvalidParams, "U diag(lambdas) U^T differs from Sigma*");
  require(std::abs(model.T_q - gaussian_width_constant(model.n, model.q)) <= 1e-12 * model.T_q,
          ErrorCode::InvalidParams, "T_q differs");
}

DataMatrix scm_sample(const SpikeModel& model, Index m, std::uint64_t seed) {
  require(m >= 1, ErrorCode::InvalidParams, "m must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Mat g0(model.n, m);
  Mat g1(model.r, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < model.n; ++i) g0(i, j) = g(rng);
    for (Index i = 0; i < model.r; ++i) g1(i, j) = g(rng);
  }
  const Mat f = model.U * model.lambdas.cwiseSqrt().asDiagonal();
  return DataMatrix(Mat(g0 + f * g1));
}

SpikeDetection spike_detect_sdp(const DataMatrix& a, Index r, double kappa, const Exponent& q, double theta_min,
                                const SolveParams& params) {
  require(theta_min > 0.0 && std::isfinite(theta_min), ErrorCode::InvalidParams, "theta_min must be positive");
  SpikeDetection out;
  out.relaxation = solve_spiked_relax(a, r, RobustnessBudget(q, kappa), params);
  const double m = static_cast<double>(a.m());
  out.statistic = (a.mat() * a.mat().transpose()).cwiseProduct(out.relaxation.X).sum() / m;
  out.threshold = (1.0 + 0.5 * theta_min) * static_cast<double>(r);
  out.yes = out.statistic > out.threshold;
  return out;
}

SpikeRecovery spike_recover_sdp(const DataMatrix& a, Index r, double kappa, const Exponent& q,
                                const SolveParams& params) {
  SpikeRecovery out;
  out.relaxation = solve_spiked_relax(a, r, RobustnessBudget(q, kappa), params);
  out.projection = top_eigenprojection(symmetrize(out.relaxation.X), r);
  const Mat p = out.projection.matrix();
  const Mat s = p * (a.mat() * a.mat().transpose() / static_cast<double>(a.m())) * p - p;
  const SymEig e = sym_eig(symmetrize(s));
  const Vec clipped = e.values.cwiseMax(0.0);
  out.Sigma_hat = symmetrize(e.vectors * clipped.asDiagonal() * e.vectors.transpose());
  out.norm = certify_projection(out.projection, q, params.oracle_rounds, params.seed);
  return out;
}

BruteSpike spike_recover_bruteforce(const DataMatrix& a, Index r, Index k, const Exponent& q) {
  const Index n = a.n();
  require(n <= 12, ErrorCode::TooLarge, "enumeration limited to n <= 12");
  require(r == 1 && q.is_infinite(), ErrorCode::InvalidParams, "enumeration supports r = 1 and q = inf only");
  require(k >= 1 && k <= n, ErrorCode::InvalidParams, "support size must be in [1, n]");
  const Mat w = a.mat() * a.mat().transpose();
  const double v = 1.0 / std::sqrt(static_cast<double>(k));
  BruteSpike best;
  best.score = -1.0;
  Vec best_v;
  std::vector<Index> sup;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != static_cast<int>(k)) continue;
    sup.clear();
    for (Index i = 0; i < n; ++i)
      if (mask & (1u << i)) sup.push_back(i);
    // The first coordinate keeps sign +1; v and -v span the same line.
    for (unsigned signs = 0; signs < (1u << (k - 1)); ++signs) {
      Vec x = Vec::Zero(n);
      x(sup[0]) = v;
      for (Index t = 1; t < k; ++t) x(sup[static_cast<std::size_t>(t)]) = (signs & (1u << (t - 1))) ? -v : v;
      const double score = x.dot(w * x);
      if (score > best.score) {
        best.score = score;
        best_v = x;
        best.support = sup;
      }
    }
  }
  best.projection = Projection::from_orthonormal(Mat(best_v));
  return best;
}

}  // namespace robsub
