#include "robsub/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "robsub/error.hpp"
#include "robsub/linalg.hpp"

namespace robsub {

double cluster_alpha(double kappa, double delta, double sigma, double mu_max) {
  require(sigma > 0.0, ErrorCode::InvalidParams, "sigma must be positive");
  return (1.0 + kappa * delta / sigma) * std::pow(1.0 + mu_max / sigma, 2.0 / 3.0);
}

double stable_separation(double c, Index k, double kappa, double delta, double sigma) {
  require(c > 0.0 && k >= 1 && sigma > 0.0, ErrorCode::InvalidParams, "bad separation parameters");
  const double sk = std::sqrt(static_cast<double>(k));
  // The right side grows like D^(2/3), so the iteration contracts.
  double d = c * sk * sigma;
  for (int it = 0; it < 1000; ++it) {
    const double next = c * cluster_alpha(kappa, delta, sigma, d / std::sqrt(2.0)) * sk * sigma;
    const bool done = std::abs(next - d) <= 1e-14 * next;
    d = next;
    if (done) break;
  }
  return d;
}

namespace {

Mat label_means(const Mat& a, const Labels& labels, Index k, std::vector<Index>& sizes) {
  Mat c = Mat::Zero(a.rows(), k);
  sizes.assign(static_cast<std::size_t>(k), 0);
  for (Index j = 0; j < a.cols(); ++j) {
    const Index l = labels[static_cast<std::size_t>(j)];
    c.col(l) += a.col(j);
    ++sizes[static_cast<std::size_t>(l)];
  }
  for (Index r = 0; r < k; ++r)
    if (sizes[static_cast<std::size_t>(r)] > 0) c.col(r) /= static_cast<double>(sizes[static_cast<std::size_t>(r)]);
  return c;
}

Mat center_matrix(const Mat& centers, const Labels& labels) {
  Mat c(centers.rows(), static_cast<Index>(labels.size()));
  for (std::size_t j = 0; j < labels.size(); ++j) c.col(static_cast<Index>(j)) = centers.col(labels[j]);
  return c;
}

}  // namespace

ClusterInstance make_gaussian_mixture(Index n, Index k, Index m, double sigma, double separation,
                                      Index support, double delta, std::uint64_t seed) {
  require(k >= 1 && support >= 1 && k * support <= n, ErrorCode::InvalidParams,
          "k disjoint supports do not fit in n");
  require(m >= k, ErrorCode::InvalidParams, "need at least one point per cluster");
  require(sigma > 0.0 && separation >= 0.0 && delta >= 0.0, ErrorCode::InvalidParams,
          "sigma must be positive and separation, delta nonnegative");
  std::mt19937_64 rng(seed);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  std::bernoulli_distribution coin(0.5);
  const double v = 1.0 / std::sqrt(static_cast<double>(support));
  Mat centers = Mat::Zero(n, k);
  for (Index r = 0; r < k; ++r)
    for (Index i = 0; i < support; ++i)
      centers(idx[static_cast<std::size_t>(r * support + i)], r) = coin(rng) ? v : -v;
  centers *= separation / std::sqrt(2.0);

  ClusterInstance inst;
  inst.k = k;
  inst.sigma = sigma;
  inst.delta = delta;
  inst.labels.resize(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) inst.labels[static_cast<std::size_t>(j)] = j % k;

  // Entry scale so the spectral norm of the noise lands near 0.8 sigma sqrt(m).
  const double sm = std::sqrt(static_cast<double>(m));
  const double s0 = 0.8 * sigma * sm / (sm + std::sqrt(static_cast<double>(n)));
  std::normal_distribution<double> g(0.0, s0);
  Mat noise(n, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i) noise(i, j) = g(rng);
  std::vector<Index> sizes;
  const Mat nm = label_means(noise, inst.labels, k, sizes);
  noise -= center_matrix(nm, inst.labels);
  const double s = spectral_norm(noise);
  if (s > sigma * sm) noise *= sigma * sm / s;

  inst.A = DataMatrix(Mat(center_matrix(centers, inst.labels) + noise));
  inst.centers = label_means(inst.A.mat(), inst.labels, k, sizes);
  inst.kappa = std::sqrt(static_cast<double>(k * support));
  inst.alpha = cluster_alpha(inst.kappa, delta, sigma, inst.centers.colwise().norm().maxCoeff());
  return inst;
}

void check_cluster_instance(const ClusterInstance& inst) {
  const Mat& a = inst.A.mat();
  require(static_cast<Index>(inst.labels.size()) == a.cols(), ErrorCode::KMismatch,
          "labels and data differ in length");
  require(inst.centers.rows() == a.rows() && inst.centers.cols() == inst.k, ErrorCode::DimensionMismatch,
          "centers have the wrong shape");
  for (Index l : inst.labels)
    require(l >= 0 && l < inst.k, ErrorCode::KMismatch, "label out of range");
  std::vector<Index> sizes;
  const Mat means = label_means(a, inst.labels, inst.k, sizes);
  for (Index s : sizes) require(s > 0, ErrorCode::EmptyCluster, "a cluster has no points");
  const double scale = std::max(1.0, inst.centers.cwiseAbs().maxCoeff());
  require((means - inst.centers).cwiseAbs().maxCoeff() <= 1e-9 * scale, ErrorCode::InvalidParams,
          "centers differ from the label-wise means");
  const double spread = spectral_norm(a - center_matrix(inst.centers, inst.labels));
  require(spread <= inst.sigma * std::sqrt(static_cast<double>(a.cols())) * (1.0 + 1e-9),
          ErrorCode::InvalidParams, "sigma bound fails");
  const double alpha = cluster_alpha(inst.kappa, inst.delta, inst.sigma, inst.centers.colwise().norm().maxCoeff());
  require(std::abs(alpha - inst.alpha) <= 1e-9 * alpha, ErrorCode::InvalidParams, "alpha differs");
}

StabilityReport stability_margin(const ClusterInstance& inst, double c) {
  require(c >= 0.0, ErrorCode::InvalidParams, "c must be nonnegative");
  const Mat& a = inst.A.mat();
  const Index k = inst.k;
  require(static_cast<Index>(inst.labels.size()) == a.cols(), ErrorCode::KMismatch,
          "labels and data differ in length");
  std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
  for (Index l : inst.labels) {
    require(l >= 0 && l < k, ErrorCode::KMismatch, "label out of range");
    ++sizes[static_cast<std::size_t>(l)];
  }
  for (Index s : sizes) require(s > 0, ErrorCode::EmptyCluster, "a cluster has no points");

  StabilityReport rep;
  rep.required = Mat::Zero(k, k);
  rep.realized = Mat::Zero(k, k);
  rep.max_c = Mat::Zero(k, k);
  rep.stable.assign(static_cast<std::size_t>(k), std::vector<bool>(static_cast<std::size_t>(k), true));
  const double sm = std::sqrt(static_cast<double>(a.cols()));
  const double unit = inst.alpha * inst.sigma * std::sqrt(static_cast<double>(k));
  for (Index r = 0; r < k; ++r) {
    for (Index s = 0; s < k; ++s) {
      if (r == s) continue;
      const double base = unit * (sm / std::sqrt(static_cast<double>(sizes[static_cast<std::size_t>(r)])) +
                                  sm / std::sqrt(static_cast<double>(sizes[static_cast<std::size_t>(s)])));
      const Vec d = inst.centers.col(s) - inst.centers.col(r);
      const double len = d.norm();
      double worst = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < a.cols(); ++j) {
        if (inst.labels[static_cast<std::size_t>(j)] != r) continue;
        // Coordinate of the projection along the line from mu_r toward mu_s.
        const double t = len > 0.0 ? (a.col(j) - inst.centers.col(r)).dot(d) / len : 0.0;
        worst = std::min(worst, std::abs(len - t) - std::abs(t));
      }
      rep.required(r, s) = c * base;
      rep.realized(r, s) = worst;
      rep.max_c(r, s) = base > 0.0 ? worst / base : 0.0;
      const bool ok = worst >= c * base;
      rep.stable[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] = ok;
      rep.all_stable = rep.all_stable && ok;
    }
  }
  return rep;
}

Labels assign_nearest(const Mat& points, const Mat& centers) {
  Labels out(static_cast<std::size_t>(points.cols()), 0);
  for (Index j = 0; j < points.cols(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (Index r = 0; r < centers.cols(); ++r) {
      const double d = (points.col(j) - centers.col(r)).squaredNorm();
      if (d < best) {
        best = d;
        out[static_cast<std::size_t>(j)] = r;
      }
    }
  }
  return out;
}

KMeansResult kmeans(const Mat& points, Index k, int restarts, std::uint64_t seed, int max_iterations) {
  const Index n = points.cols();
  require(k >= 1, ErrorCode::InvalidParams, "k must be positive");
  require(n >= k, ErrorCode::KMeansFailure, "fewer points than clusters");
  require(restarts >= 1 && max_iterations >= 1, ErrorCode::InvalidParams, "restarts and iterations must be positive");
  KMeansResult best;
  best.cost = std::numeric_limits<double>::infinity();
  bool any_converged = false;

  for (int rs = 0; rs < restarts; ++rs) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(rs)));
    // k-means++ seeding.
    Mat c(points.rows(), k);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    c.col(0) = points.col(pick(rng));
    Vec d2(n);
    for (Index j = 0; j < n; ++j) d2(j) = (points.col(j) - c.col(0)).squaredNorm();
    for (Index r = 1; r < k; ++r) {
      const double total = d2.sum();
      Index choice = 0;
      if (total > 0.0) {
        std::uniform_real_distribution<double> u(0.0, total);
        double x = u(rng);
        while (choice < n - 1 && x >= d2(choice)) x -= d2(choice++);
      } else {
        choice = pick(rng);
      }
      c.col(r) = points.col(choice);
      for (Index j = 0; j < n; ++j) d2(j) = std::min(d2(j), (points.col(j) - c.col(r)).squaredNorm());
    }

    Labels labels = assign_nearest(points, c);
    bool converged = false;
    for (int it = 0; it < max_iterations; ++it) {
      Mat sum = Mat::Zero(points.rows(), k);
      std::vector<Index> cnt(static_cast<std::size_t>(k), 0);
      for (Index j = 0; j < n; ++j) {
        sum.col(labels[static_cast<std::size_t>(j)]) += points.col(j);
        ++cnt[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])];
      }
      for (Index r = 0; r < k; ++r) {
        if (cnt[static_cast<std::size_t>(r)] > 0) {
          c.col(r) = sum.col(r) / static_cast<double>(cnt[static_cast<std::size_t>(r)]);
        } else {
          // Empty cluster: move it to the point farthest from its center.
          Index far = 0;
          double fd = -1.0;
          for (Index j = 0; j < n; ++j) {
            const double d = (points.col(j) - c.col(labels[static_cast<std::size_t>(j)])).squaredNorm();
            if (d > fd) {
              fd = d;
              far = j;
            }
          }
          c.col(r) = points.col(far);
        }
      }
      Labels next = assign_nearest(points, c);
      if (next == labels) {
        converged = true;
        break;
      }
      labels = std::move(next);
    }
    if (!converged) continue;
    any_converged = true;
    double cost = 0.0;
    for (Index j = 0; j < n; ++j) cost += (points.col(j) - c.col(labels[static_cast<std::size_t>(j)])).squaredNorm();
    if (cost < best.cost) {
      best.cost = cost;
      best.centers = c;
      best.labels = std::move(labels);
    }
  }
  require(any_converged, ErrorCode::KMeansFailure, "Lloyd refinement did not settle");
  return best;
}

CertifyOutcome<ClusterInit> lloyd_init(const DataMatrix& a_tilde, Index k, double kappa, double sigma,
                                       const Exponent& q, const SolveParams& params) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::InvalidParams, "sigma must be positive");
  require(k >= 1 && k <= a_tilde.m(), ErrorCode::InvalidParams, "k must be in [1, m]");
  const double tau = 2.0 * sigma * std::sqrt(static_cast<double>(a_tilde.m()));
  auto cert = certify_or_project_spectral(a_tilde, tau, k, RobustnessBudget(q, kappa), params);
  if (!cert.solved()) return {cert.bad_input()};
  ClusterInit out;
  out.certificate = cert.value();
  out.projection = out.certificate.pca.projection;
  const Mat& b = out.projection.basis();
  const Mat y = b.transpose() * a_tilde.mat();
  const KMeansResult km = kmeans(y, k, 10, params.seed);
  out.centers = b * km.centers;
  return {std::move(out)};
}

ImprovedCenters center_improve(const DataMatrix& a_tilde, const Projection& p, const Mat& centers) {
  require(centers.rows() == a_tilde.n() && p.dim() == a_tilde.n(), ErrorCode::DimensionMismatch,
          "centers, projection and data differ in dimension");
  const Index k = centers.cols();
  const Mat& b = p.basis();
  const Mat y = b.transpose() * a_tilde.mat();
  // Distances are taken inside the projected space.
  const Mat v = b.transpose() * centers;
  ImprovedCenters out;
  out.centers = centers;
  out.kept.assign(static_cast<std::size_t>(k), false);
  Mat sum = Mat::Zero(y.rows(), k);
  std::vector<Index> cnt(static_cast<std::size_t>(k), 0);
  for (Index j = 0; j < y.cols(); ++j) {
    Vec d(k);
    for (Index r = 0; r < k; ++r) d(r) = (y.col(j) - v.col(r)).norm();
    for (Index r = 0; r < k; ++r) {
      bool in = true;
      for (Index s = 0; s < k && in; ++s)
        if (s != r && d(r) > d(s) / 3.0) in = false;
      if (in) {
        sum.col(r) += y.col(j);
        ++cnt[static_cast<std::size_t>(r)];
      }
    }
  }
  for (Index r = 0; r < k; ++r) {
    if (cnt[static_cast<std::size_t>(r)] == 0) {
      out.kept[static_cast<std::size_t>(r)] = true;
      continue;
    }
    out.centers.col(r) = b * (sum.col(r) / static_cast<double>(cnt[static_cast<std::size_t>(r)]));
  }
  return out;
}

CertifyOutcome<LloydResult> robust_lloyd(const DataMatrix& a_tilde, Index k, double kappa, double sigma,
                                         const Exponent& q, int iterations, const SolveParams& params) {
  require(iterations >= 0, ErrorCode::InvalidParams, "iterations must be nonnegative");
  auto init = lloyd_init(a_tilde, k, kappa, sigma, q, params);
  if (!init.solved()) return {init.bad_input()};
  LloydResult out;
  out.projection = init.value().projection;
  out.initial_centers = init.value().centers;
  const ImprovedCenters imp = center_improve(a_tilde, out.projection, out.initial_centers);
  out.improved_centers = imp.centers;
  Mat nu = imp.centers;
  const Mat& b = out.projection.basis();
  const Mat y = b.transpose() * a_tilde.mat();
  const Mat& a = a_tilde.mat();

  out.assignment = assign_nearest(y, b.transpose() * nu);
  for (int t = 0; t < iterations; ++t) {
    out.assignment = assign_nearest(y, b.transpose() * nu);
    out.trajectory.push_back(out.assignment);
    Mat next = nu;
    for (Index r = 0; r < k; ++r) {
      std::vector<Index> cols;
      for (Index j = 0; j < a.cols(); ++j)
        if (out.assignment[static_cast<std::size_t>(j)] == r) cols.push_back(j);
      if (cols.empty()) {
        ++out.empty_updates;
        continue;
      }
      Mat s(a.rows(), static_cast<Index>(cols.size()));
      for (std::size_t i = 0; i < cols.size(); ++i) s.col(static_cast<Index>(i)) = a.col(cols[i]);
      auto est = robust_mean(DataMatrix(std::move(s)), kappa, 4.0 * sigma, q, params);
      if (!est.solved()) return {est.bad_input()};
      next.col(r) = est.value().mu_hat;
    }
    nu = std::move(next);
    out.center_history.push_back(nu);
  }
  out.centers = nu;
  return {std::move(out)};
}

namespace {

// Min-cost perfect matching on a square matrix; row i goes to column match[i].
std::vector<Index> hungarian(const Mat& cost) {
  const Index n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Index> p(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<bool> used(static_cast<std::size_t>(n + 1), false);
    do {
      used[static_cast<std::size_t>(j0)] = true;
      const Index i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> match(static_cast<std::size_t>(n), 0);
  for (Index j = 1; j <= n; ++j) match[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return match;
}

Mat overlap_matrix(const Labels& assignment, const Labels& truth, Index k) {
  require(assignment.size() == truth.size(), ErrorCode::KMismatch, "assignments differ in length");
  Mat o = Mat::Zero(k, k);
  for (std::size_t j = 0; j < truth.size(); ++j) {
    require(assignment[j] >= 0 && assignment[j] < k && truth[j] >= 0 && truth[j] < k, ErrorCode::KMismatch,
            "label out of range");
    o(assignment[j], truth[j]) += 1.0;
  }
  return o;
}

}  // namespace

std::vector<Index> best_label_matching(const Labels& assignment, const Labels& truth, Index k) {
  require(k >= 1, ErrorCode::KMismatch, "k must be positive");
  return hungarian(-overlap_matrix(assignment, truth, k));
}

double misclassification(const Labels& assignment, const Labels& truth) {
  require(assignment.size() == truth.size(), ErrorCode::KMismatch, "assignments differ in length");
  if (truth.empty()) return 0.0;
  Index k = 0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    require(assignment[j] >= 0 && truth[j] >= 0, ErrorCode::KMismatch, "labels must be nonnegative");
    k = std::max({k, assignment[j] + 1, truth[j] + 1});
  }
  const Mat o = overlap_matrix(assignment, truth, k);
  const std::vector<Index> match = hungarian(-o);
  double agree = 0.0;
  for (Index r = 0; r < k; ++r) agree += o(r, match[static_cast<std::size_t>(r)]);
  return 1.0 - agree / static_cast<double>(truth.size());
}

}  // namespace robsub
