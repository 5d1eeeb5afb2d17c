#include "robsub/meanest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "robsub/error.hpp"
#include "robsub/linalg.hpp"
#include "robsub/opnorms.hpp"

namespace robsub {

namespace {

// Centers the rows and scales the whole block so ||g||_spec <= bound.
void center_and_cap(Mat& g, double bound) {
  if (g.size() == 0) return;
  g.colwise() -= g.rowwise().mean();
  const double s = spectral_norm(g);
  if (s > bound) g *= bound / s;
}

}  // namespace

MeanInstance make_sparse_mean_instance(Index n, Index k, double sigma, Index m, const Exponent& q,
                                       std::uint64_t seed) {
  require(n >= 1 && m >= 1, ErrorCode::InvalidParams, "n and m must be positive");
  require(k >= 1 && k <= n, ErrorCode::InvalidParams, "sparsity must be in [1, n]");
  require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::InvalidParams, "sigma must be positive");
  std::mt19937_64 rng(seed);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  std::bernoulli_distribution coin(0.5);
  Vec mu = Vec::Zero(n);
  const double v = 1.0 / std::sqrt(static_cast<double>(k));
  for (Index i = 0; i < k; ++i) mu(idx[static_cast<std::size_t>(i)]) = coin(rng) ? v : -v;

  std::normal_distribution<double> g(0.0, sigma);
  Mat noise(n, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i) noise(i, j) = g(rng);
  center_and_cap(noise, sigma * std::sqrt(static_cast<double>(m)));

  MeanInstance inst;
  inst.A = DataMatrix(Mat(noise.colwise() + mu));
  inst.mu = inst.A.mat().rowwise().mean();
  inst.sigma = sigma;
  inst.q = q;
  inst.kappa = vector_norm(inst.mu / inst.mu.norm(), q.dual());
  return inst;
}

void check_mean_instance(const MeanInstance& inst) {
  const Mat& a = inst.A.mat();
  require(inst.mu.size() == a.rows(), ErrorCode::DimensionMismatch, "mean has the wrong length");
  const Vec mean = a.rowwise().mean();
  const double scale = std::max(1.0, inst.mu.cwiseAbs().maxCoeff());
  require((mean - inst.mu).cwiseAbs().maxCoeff() <= 1e-10 * scale, ErrorCode::InvalidParams,
          "stored mean differs from the row means");
  const double spread = spectral_norm(a.colwise() - inst.mu);
  require(spread <= inst.sigma * std::sqrt(static_cast<double>(a.cols())) * (1.0 + 1e-9),
          ErrorCode::InvalidParams, "sigma bound fails");
  const double nm = inst.mu.norm();
  require(nm > 0.0, ErrorCode::InvalidParams, "mean is zero");
  require(vector_norm(inst.mu / nm, inst.q.dual()) <= inst.kappa * (1.0 + 1e-9) + 1e-12,
          ErrorCode::InvalidParams, "kappa is below the robustness of the mean direction");
}

CertifyOutcome<MeanEstimate> robust_mean(const DataMatrix& a_tilde, double kappa, double sigma,
                                         const Exponent& q, const SolveParams& params, bool project) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::InvalidParams, "sigma must be positive");
  const RobustnessBudget budget(q, kappa);
  const double tau = 2.0 * sigma * std::sqrt(static_cast<double>(a_tilde.m()));
  auto cert = certify_or_project_spectral(a_tilde, tau, 1, budget, params);
  if (!cert.solved()) return {cert.bad_input()};
  MeanEstimate est;
  est.certificate = cert.value();
  const Mat& a = a_tilde.mat();
  est.mu_hat = project ? Vec(est.certificate.pca.projection.apply(Vec(a.rowwise().mean())))
                       : Vec(a.rowwise().mean());
  return {std::move(est)};
}

double estimate_sigma(const DataMatrix& a_tilde) {
  const Mat& a = a_tilde.mat();
  return spectral_norm(a.colwise() - a.rowwise().mean()) / std::sqrt(static_cast<double>(a.cols()));
}

MeanLbInstance mean_lb_instance(Index n, double sigma, Index m, std::uint64_t seed) {
  require(sigma > 0.0 && sigma <= 1.0 / 6.0, ErrorCode::InvalidParams, "sigma must be in (0, 1/6]");
  require(n >= 1 && m >= 1, ErrorCode::InvalidParams, "n and m must be positive");
  // delta sqrt(k) = 3 sigma and delta n = sqrt(k) give k = 3 sigma n.
  const double kr = 3.0 * sigma * static_cast<double>(n);
  const double kround = std::round(kr);
  require(kround >= 1.0 && std::abs(kr - kround) <= 1e-9 * std::max(1.0, kr), ErrorCode::InvalidParams,
          "3 sigma n must be a positive integer");
  const auto k = static_cast<Index>(kround);
  const double sk = std::sqrt(static_cast<double>(k));

  MeanLbInstance t;
  t.k = k;
  t.sigma = sigma;
  t.delta = sk / static_cast<double>(n);
  t.kappa = 2.0 * sk;
  t.mu1 = Vec::Zero(n);
  t.mu1.head(k).setConstant(1.0 / sk);
  // sgn(mu1) is +1 everywhere, zeros included.
  t.mu2 = t.mu1.array() + t.delta;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  Mat noise = Mat::Zero(n, m);
  if (n > k) {
    Mat tail(n - k, m);
    for (Index j = 0; j < m; ++j)
      for (Index i = 0; i < n - k; ++i) tail(i, j) = g(rng);
    center_and_cap(tail, sigma * std::sqrt(static_cast<double>(m)));
    noise.bottomRows(n - k) = tail;
  }
  t.A = DataMatrix(Mat(noise.colwise() + t.mu1));
  t.A_tilde = DataMatrix(Mat(t.A.mat().array() + t.delta));
  t.separation = (t.mu1 - t.mu2).norm();

  const Exponent inf = Exponent::infinity();
  const double tol = 1e-9;
  require(std::abs(t.separation - std::sqrt(3.0 * sigma)) <= tol, ErrorCode::SolverFailure,
          "separation identity fails");
  require(max_column_distance(t.A.mat(), t.A_tilde.mat(), inf) <= t.delta * (1.0 + tol),
          ErrorCode::SolverFailure, "perturbation exceeds delta");
  require(std::abs(t.kappa * t.delta - 6.0 * sigma) <= tol, ErrorCode::SolverFailure,
          "kappa delta differs from 6 sigma");
  for (const Vec* mu : {&t.mu1, &t.mu2}) {
    const double nm = mu->norm();
    require(nm >= 1.0 - tol && nm <= 2.0 + tol, ErrorCode::SolverFailure, "mean norm outside [1, 2]");
    require(mu->lpNorm<1>() / nm <= t.kappa + tol, ErrorCode::SolverFailure, "mean is not kappa robust");
  }
  const double spread = spectral_norm(t.A.mat().colwise() - t.mu1);
  require(spread <= sigma * std::sqrt(static_cast<double>(m)) * (1.0 + tol), ErrorCode::SolverFailure,
          "variance bound fails");
  return t;
}

namespace {

struct Evaluation {
  double objective = 0.0;
  Mat a_prime;
};

// Best A' within delta of A~ column by column for the direction v, measured by
// the residual ||(I - v v^T) A'_j||, then scored in spectral norm.
Evaluation evaluate_direction(const Mat& a, const Vec& v, double delta, const Exponent& q) {
  const Index n = a.rows();
  const Index m = a.cols();
  Mat ap = a;
  if (delta > 0.0) {
    if (q.is_infinite()) {
      // min over t and w in the box of |w - t v|^2: w = clamp(t v), t by bisection
      // on the nondecreasing derivative.
      for (Index j = 0; j < m; ++j) {
        const Vec lo = a.col(j).array() - delta;
        const Vec hi = a.col(j).array() + delta;
        auto slope = [&](double t) {
          const Vec tv = t * v;
          const Vec w = tv.cwiseMax(lo).cwiseMin(hi);
          return v.dot(tv - w);
        };
        double l = -1.0;
        double h = 1.0;
        while (slope(l) > 0.0) l *= 2.0;
        while (slope(h) < 0.0) h *= 2.0;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (l + h);
          if (slope(mid) < 0.0) l = mid;
          else h = mid;
        }
        const Vec tv = 0.5 * (l + h) * v;
        ap.col(j) = tv.cwiseMax(lo).cwiseMin(hi);
      }
    } else {
      // Projected gradient on z with ||z||_q <= delta; the gradient is 1-Lipschitz.
      for (Index j = 0; j < m; ++j) {
        const Vec col = a.col(j);
        Vec z = Vec::Zero(n);
        for (int it = 0; it < 100; ++it) {
          Vec res = col - z;
          res -= v * v.dot(res);
          const Vec next = project_entrywise_ball(Mat(z + res), q, delta);
          const double step = (next - z).norm();
          z = next;
          if (step <= 1e-12 * (1.0 + col.norm())) break;
        }
        ap.col(j) = col - z;
      }
    }
  }
  Mat res = ap - v * (v.transpose() * ap);
  Evaluation e;
  e.objective = spectral_norm(res);
  e.a_prime = std::move(ap);
  return e;
}

Vec top_direction(const Mat& a) {
  return sym_eig_top(symmetrize(a * a.transpose()), 1).vectors.col(0);
}

}  // namespace

ExhaustiveMean robust_mean_exhaustive(const DataMatrix& a_tilde, double kappa, double delta,
                                      const Exponent& q, int budget) {
  const RobustnessBudget rb(q, kappa);
  require(delta >= 0.0 && std::isfinite(delta), ErrorCode::InvalidParams, "delta must be >= 0");
  require(budget >= 1, ErrorCode::InvalidParams, "budget must be positive");
  const Index n = a_tilde.n();
  require(n <= 64, ErrorCode::TooLarge, "exhaustive mean search is limited to n <= 64");
  const Mat& a = a_tilde.mat();
  const Exponent qs = q.dual();
  const double cap = kappa * (1.0 + 1e-12);

  ExhaustiveMean best;
  best.objective = std::numeric_limits<double>::infinity();
  Mat best_ap;
  auto consider = [&](Vec v) {
    if (best.evaluated >= budget) return false;
    const double nv = v.norm();
    if (!(nv > 0.0)) return false;
    v /= nv;
    if (vector_norm(v, qs) > cap) return false;
    ++best.evaluated;
    Evaluation e = evaluate_direction(a, v, delta, q);
    if (e.objective < best.objective) {
      best.objective = e.objective;
      best.direction = v;
      best_ap = std::move(e.a_prime);
      return true;
    }
    return false;
  };

  const Vec top = top_direction(a);
  consider(top);
  if (delta > 0.0) consider(top_direction(shrink_gamma_q(a_tilde, delta, q).mat()));
  // 1-sparse directions are always feasible.
  for (Index i = 0; i < n; ++i) consider(Vec::Unit(n, i));

  if (q.is_infinite() && n <= 12) {
    // Uniform vectors on every support of size <= kappa^2, signs from the top direction.
    const auto smax = static_cast<Index>(std::floor(kappa * kappa + 1e-9));
    for (std::uint32_t mask = 1; mask < (1u << n) && best.evaluated < budget; ++mask) {
      const auto s = static_cast<Index>(std::popcount(mask));
      if (s < 2 || s > smax) continue;
      Vec v = Vec::Zero(n);
      for (Index i = 0; i < n; ++i)
        if (mask & (1u << i)) v(i) = top(i) < 0.0 ? -1.0 : 1.0;
      consider(v);
    }
  }

  // Alternate: refit the direction to the current A', moving only as far as
  // the robustness budget allows.
  while (best.evaluated < budget && best.direction.size() == n) {
    const Vec cur = best.direction;
    Vec cand = top_direction(best_ap);
    if (cand.dot(cur) < 0.0) cand = -cand;
    if (vector_norm(cand, qs) > cap) {
      double lo = 0.0;
      double hi = 1.0;
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Vec w = ((1.0 - mid) * cur + mid * cand).normalized();
        if (vector_norm(w, qs) <= cap) lo = mid;
        else hi = mid;
      }
      cand = ((1.0 - lo) * cur + lo * cand).normalized();
    }
    const double before = best.objective;
    if ((cand - cur).norm() <= 1e-10 || !consider(cand) || before - best.objective <= 1e-12 * before) break;
  }

  require(best.direction.size() == n, ErrorCode::SolverFailure, "no feasible direction was evaluated");
  const Vec mean = best_ap.rowwise().mean();
  best.mu_hat = best.direction * best.direction.dot(mean);
  return best;
}

}  // namespace robsub
