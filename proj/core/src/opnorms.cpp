#include "robsub/opnorms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "robsub/error.hpp"
#include "robsub/linalg.hpp"

namespace robsub {

namespace {

constexpr double kPi = 3.14159265358979323846;

Index sdp_width(Index n) {
  return std::max<Index>(1, std::min<Index>(n, static_cast<Index>(std::ceil(std::sqrt(2.0 * n))) + 1));
}

double scale_of(const Mat& b) { return std::max(b.cwiseAbs().maxCoeff(), 1e-300); }

bool lex_less(const Vec& a, const Vec& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

// x and -x are the same witness; keep the one with a positive leading entry.
void canonicalize(Vec& x) {
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) != 0.0) {
      if (x(i) < 0) x = -x;
      return;
    }
  }
}

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  Vec x;

  void offer(double v, Vec cand, double tol) {
    canonicalize(cand);
    if (x.size() == 0 || v > value + tol || (v >= value - tol && lex_less(cand, x))) {
      value = v;
      x = std::move(cand);
    }
  }
};

Vec sign_of(const Vec& v) {
  Vec s(v.size());
  for (Index i = 0; i < v.size(); ++i) s(i) = v(i) < 0 ? -1.0 : 1.0;
  return s;
}

// Steepest single-flip ascent of x^T B x over sign vectors.
void sign_local_search(const Mat& b, Vec& x, double tol) {
  Vec h = b * x;
  for (int guard = 0; guard < 100000; ++guard) {
    Index arg = -1;
    double best = tol;
    for (Index i = 0; i < x.size(); ++i) {
      const double delta = -4.0 * x(i) * (h(i) - b(i, i) * x(i));
      if (delta > best) {
        best = delta;
        arg = i;
      }
    }
    if (arg < 0) break;
    h.noalias() -= 2.0 * x(arg) * b.col(arg);
    x(arg) = -x(arg);
  }
}

// argmax of <h, x> over the unit l_q ball.
Vec dual_map(const Vec& h, const Exponent& q) {
  const Index n = h.size();
  if (q.is_infinite()) return sign_of(h);
  const double qs = q.dual().value();
  const double nrm = vector_norm(h, q.dual());
  if (nrm == 0.0) {
    Vec x = Vec::Zero(n);
    if (n > 0) x(0) = 1.0;
    return x;
  }
  Vec x(n);
  for (Index i = 0; i < n; ++i) {
    const double a = std::abs(h(i)) / nrm;
    x(i) = (h(i) < 0 ? -1.0 : 1.0) * std::pow(a, qs - 1.0);
  }
  return x;
}

Vec normalize_q(const Vec& v, const Exponent& q) {
  const double nrm = vector_norm(v, q);
  if (nrm == 0.0) return v;
  return v / nrm;
}

// Ascent for max x^T B x over the unit l_q ball, q finite.
void power_ascent(const Mat& b, Vec& x, const Exponent& q, int iters) {
  double val = x.dot(b * x);
  for (int t = 0; t < iters; ++t) {
    Vec nx = dual_map(b * x, q);
    const double nv = nx.dot(b * nx);
    if (nv <= val * (1.0 + 1e-13) + 1e-300) {
      if (nv > val) x = nx;
      break;
    }
    x = nx;
    val = nv;
  }
}

struct Factor {
  Mat V;
  Mat G;  // B V
  double value = -std::numeric_limits<double>::infinity();
};

Mat random_rows(Index n, Index k, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Mat v(n, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < n; ++i) v(i, j) = nd(rng);
  return v;
}

// Block coordinate ascent on max <B, V V^T> with unit rows of V.
Factor mixing_method(const Mat& b, Index k, std::mt19937_64& rng) {
  const Index n = b.rows();
  Factor f;
  f.V = random_rows(n, k, rng);
  for (Index i = 0; i < n; ++i) {
    const double nr = f.V.row(i).norm();
    if (nr > 0) f.V.row(i) /= nr;
    else f.V(i, 0) = 1.0;
  }
  f.G = b * f.V;
  double val = f.V.cwiseProduct(f.G).sum();
  for (int sweep = 0; sweep < 1000; ++sweep) {
    for (Index i = 0; i < n; ++i) {
      Eigen::RowVectorXd g = f.G.row(i) - b(i, i) * f.V.row(i);
      const double nr = g.norm();
      if (nr <= 1e-300) continue;
      g /= nr;
      const Eigen::RowVectorXd delta = g - f.V.row(i);
      if (delta.squaredNorm() == 0.0) continue;
      f.G.noalias() += b.col(i) * delta;
      f.V.row(i) = g;
    }
    const double nv = f.V.cwiseProduct(f.G).sum();
    const bool done = std::abs(nv - val) <= 1e-11 * std::max(1.0, std::abs(nv));
    val = nv;
    if (done) break;
  }
  f.G = b * f.V;
  f.value = f.V.cwiseProduct(f.G).sum();
  return f;
}

// Ascent on max <B, V V^T> subject to ||(row norms of V)||_{q} <= 1, q finite.
Factor row_power_method(const Mat& b, Index k, const Exponent& q, std::mt19937_64& rng) {
  const Index n = b.rows();
  Factor f;
  f.V = random_rows(n, k, rng);
  {
    Vec rn(n);
    for (Index i = 0; i < n; ++i) rn(i) = f.V.row(i).norm();
    f.V /= std::max(vector_norm(rn, q), 1e-300);
  }
  double val = f.V.cwiseProduct(b * f.V).sum();
  for (int it = 0; it < 2000; ++it) {
    const Mat g = b * f.V;
    Vec rn(n);
    for (Index i = 0; i < n; ++i) rn(i) = g.row(i).norm();
    if (rn.maxCoeff() <= 0.0) break;
    const Vec t = dual_map(rn, q);
    Mat nv(n, k);
    for (Index i = 0; i < n; ++i) {
      if (rn(i) > 0) nv.row(i) = g.row(i) * (t(i) / rn(i));
      else nv.row(i).setZero();
    }
    const double nval = nv.cwiseProduct(b * nv).sum();
    if (nval <= val) break;
    const bool done = nval - val <= 1e-12 * std::max(1.0, std::abs(nval));
    f.V = nv;
    val = nval;
    if (done) break;
  }
  f.G = b * f.V;
  f.value = f.V.cwiseProduct(f.G).sum();
  return f;
}

// Shift a diagonal candidate until diag(d) - B is PSD; returns the shifted d.
Vec make_dual_feasible(const Mat& b, Vec d) {
  const Index n = b.rows();
  Mat s = -b;
  s.diagonal() += d;
  const double lmin = lambda_min(s);
  const double margin = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(n) *
                        (scale_of(b) + d.cwiseAbs().maxCoeff());
  d.array() += std::max(0.0, -lmin) + margin;
  return d;
}

// Coordinate descent on the diagonal dual, starting from lambda_max * 1.
Vec diagonal_coordinate_descent(const Mat& b) {
  const Index n = b.rows();
  Vec d = Vec::Constant(n, lambda_max(b));
  const double slack = 1e-12 * scale_of(b);
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (Index i = 0; i < n; ++i) {
      if (n == 1) {
        d(0) = b(0, 0);
        continue;
      }
      Mat s(n - 1, n - 1);
      Vec col(n - 1);
      for (Index a = 0, ra = 0; a < n; ++a) {
        if (a == i) continue;
        col(ra) = b(a, i);
        for (Index c = 0, rc = 0; c < n; ++c) {
          if (c == i) continue;
          s(ra, rc) = -b(a, c) + (a == c ? d(a) : 0.0);
          ++rc;
        }
        ++ra;
      }
      Eigen::LLT<Mat> llt(s);
      if (llt.info() != Eigen::Success) continue;
      const double need = b(i, i) + col.dot(llt.solve(col)) + slack;
      if (std::isfinite(need) && need < d(i)) d(i) = need;
    }
  }
  return d;
}

double gamma_quadrature(double r) {
  // E|g|^r = 2 * int_0^inf x^r phi(x) dx, composite Simpson on [0, 40].
  const int steps = 40000;
  const double h = 40.0 / steps;
  auto f = [r](double x) { return std::pow(x, r) * std::exp(-0.5 * x * x); };
  double acc = f(0.0) + f(40.0);
  for (int i = 1; i < steps; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  const double moment = 2.0 * acc * h / 3.0 / std::sqrt(2.0 * kPi);
  return std::pow(moment, 1.0 / r);
}

Mat checked_symmetric(const Mat& b, const char* what) {
  require(b.rows() == b.cols(), ErrorCode::DimensionMismatch, std::string(what) + " must be square");
  require_finite(b, what);
  const double asym = (b - b.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-8 * std::max(1.0, b.cwiseAbs().maxCoeff()), ErrorCode::InvalidParams,
          std::string(what) + " must be symmetric");
  return symmetrize(b);
}

NormEstimate psd_oracle_impl(const Mat& b_in, const Exponent& q, int rounds, std::uint64_t seed) {
  require(q.is_infinite() || q.value() >= 2.0, ErrorCode::InvalidParams, "oracle needs q >= 2");
  const Mat b = checked_symmetric(b_in, "PSD oracle input");
  const Index n = b.rows();
  NormEstimate est;
  est.approx_factor = psd_oracle_factor(q);
  if (n == 0) return est;
  const Mat bc = clip_psd(b);
  const double tol = 1e-12 * scale_of(b) * static_cast<double>(n);

  if (!q.is_infinite() && q.value() == 2.0) {
    const SymEig top = sym_eig_top(bc, 1);
    Vec x = top.vectors.col(0);
    canonicalize(x);
    est.witness = x;
    est.lower_bound = x.dot(b * x);
    est.upper_bound = std::max(top.values(0), est.lower_bound) + 64.0 * std::numeric_limits<double>::epsilon() * scale_of(b) * n;
    return est;
  }

  Best best;
  {
    Vec w;
    heuristic_witness(bc, q, w);
    best.offer(w.dot(b * w), w, tol);
  }

  const Index k = sdp_width(n);
  const int restarts = 3;
  Factor f;
  for (int rs = 0; rs < restarts; ++rs) {
    std::mt19937_64 rng(derive_seed(seed, 0x5eedULL + rs));
    Factor cand = q.is_infinite() ? mixing_method(bc, k, rng) : row_power_method(bc, k, q, rng);
    if (cand.value > f.value) f = std::move(cand);
  }

  std::normal_distribution<double> nd;
  for (int t = 0; t < rounds; ++t) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    Vec g(k);
    for (Index j = 0; j < k; ++j) g(j) = nd(rng);
    Vec x = f.V * g;
    if (q.is_infinite()) {
      x = sign_of(x);
      sign_local_search(bc, x, tol);
    } else {
      if (x.norm() == 0.0) continue;
      x = normalize_q(x, q);
      power_ascent(bc, x, q, 200);
    }
    best.offer(x.dot(b * x), x, tol);
  }

  Vec d(n);
  if (q.is_infinite()) {
    for (Index i = 0; i < n; ++i) d(i) = f.V.row(i).dot(f.G.row(i));
  } else {
    for (Index i = 0; i < n; ++i) {
      const double vv = f.V.row(i).squaredNorm();
      d(i) = vv > 1e-300 ? f.V.row(i).dot(f.G.row(i)) / vv : 0.0;
    }
  }
  d = make_dual_feasible(bc, d);
  double upper;
  if (q.is_infinite()) {
    upper = d.sum();
    if (n <= 48) upper = std::min(upper, make_dual_feasible(bc, diagonal_coordinate_descent(bc)).sum());
  } else {
    const Exponent pstar(q.value() / (q.value() - 2.0));
    upper = vector_norm(d, pstar);
    if (n <= 48) upper = std::min(upper, vector_norm(make_dual_feasible(bc, diagonal_coordinate_descent(bc)), pstar));
  }

  est.witness = best.x;
  est.lower_bound = best.value;
  // Rounding error can put the exact witness value a hair above the certificate.
  est.upper_bound = std::max(upper, est.lower_bound);
  return est;
}

}  // namespace

double vector_norm(const Vec& v, const Exponent& q) {
  require_finite(v, "vector");
  if (v.size() == 0) return 0.0;
  if (q.is_infinite()) return v.cwiseAbs().maxCoeff();
  const double p = q.value();
  if (p == 1.0) return v.cwiseAbs().sum();
  if (p == 2.0) return v.norm();
  const double mx = v.cwiseAbs().maxCoeff();
  if (mx == 0.0) return 0.0;
  double acc = 0.0;
  for (Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v(i)) / mx, p);
  return mx * std::pow(acc, 1.0 / p);
}

double gaussian_moment_gamma(double r) {
  require(r > 0.0 && std::isfinite(r), ErrorCode::InvalidParams, "moment order must be positive");
  return gamma_quadrature(r);
}

double psd_oracle_factor(const Exponent& q) {
  if (q.is_infinite()) return kPi / 2.0;
  if (q.value() == 2.0) return 1.0;
  const double g = gaussian_moment_gamma(q.dual().value());
  return 1.0 / (g * g);
}

Mat clip_psd(const Mat& b) {
  const SymEig e = sym_eig(b);
  if (e.values.size() == 0) return b;
  const double nrm = e.values.cwiseAbs().maxCoeff();
  const double lmin = e.values(e.values.size() - 1);
  require(lmin >= -1e-6 * nrm, ErrorCode::NotPSD, "matrix has eigenvalue " + std::to_string(lmin));
  if (lmin >= 0.0) return symmetrize(b);
  const Vec clipped = e.values.cwiseMax(0.0);
  return e.vectors * clipped.asDiagonal() * e.vectors.transpose();
}

double heuristic_witness(const Mat& b, const Exponent& q, Vec& witness) {
  const SymEig top = sym_eig_top(b, std::min<Index>(b.rows(), 3));
  return heuristic_witness(b, q, top.vectors, witness);
}

double heuristic_witness(const Mat& b, const Exponent& q, const Mat& candidates, Vec& witness) {
  const Index n = b.rows();
  const double tol = 1e-12 * scale_of(b) * static_cast<double>(std::max<Index>(n, 1));
  Best best;
  for (Index c = 0; c < candidates.cols(); ++c) {
    Vec x = candidates.col(c);
    if (x.cwiseAbs().maxCoeff() == 0.0) continue;
    if (q.is_infinite()) {
      x = sign_of(x);
      sign_local_search(b, x, tol);
    } else {
      x = normalize_q(x, q);
      power_ascent(b, x, q, 200);
    }
    best.offer(x.dot(b * x), x, tol);
  }
  if (best.x.size() == 0) {
    best.x = Vec::Zero(n);
    best.value = 0.0;
  }
  witness = best.x;
  return best.value;
}

double exact_inf_to_1_bruteforce(const Mat& b, Vec* argmax) {
  const Index n = b.rows();
  require(b.cols() == n, ErrorCode::DimensionMismatch, "matrix must be square");
  require(n <= 20, ErrorCode::TooLarge, "sign enumeration limited to n <= 20");
  if (n == 0) return 0.0;
  // Gray code over x_1..x_{n-1}; x_0 = +1 by symmetry.
  Vec x = Vec::Ones(n);
  Vec h = b * x;
  double val = x.dot(h);
  double best = val;
  Vec bx = x;
  const std::uint64_t total = 1ULL << (n - 1);
  for (std::uint64_t g = 1; g < total; ++g) {
    const Index i = 1 + static_cast<Index>(__builtin_ctzll(g));
    val += -4.0 * x(i) * (h(i) - b(i, i) * x(i));
    h.noalias() -= 2.0 * x(i) * b.col(i);
    x(i) = -x(i);
    if (val > best) {
      best = val;
      bx = x;
    }
  }
  best = bx.dot(b * bx);
  if (argmax) *argmax = bx;
  return best;
}

double exact_q_to_2_bruteforce(const Mat& m, const Exponent& q, int grid_budget) {
  require_finite(m, "matrix");
  const Index p = m.cols();
  if (p == 0) return 0.0;
  if (q.is_infinite()) {
    require(p <= 20, ErrorCode::TooLarge, "sign enumeration limited to 20 columns");
    Vec x = Vec::Ones(p);
    Vec y = m * x;
    double best = y.squaredNorm();
    const std::uint64_t total = 1ULL << (p - 1);
    for (std::uint64_t g = 1; g < total; ++g) {
      const Index i = 1 + static_cast<Index>(__builtin_ctzll(g));
      y.noalias() -= 2.0 * x(i) * m.col(i);
      x(i) = -x(i);
      best = std::max(best, y.squaredNorm());
    }
    return std::sqrt(best);
  }
  const Mat b = m.transpose() * m;
  std::mt19937_64 rng(derive_seed(0x9d1dULL, static_cast<std::uint64_t>(grid_budget)));
  std::normal_distribution<double> nd;
  std::vector<std::pair<double, Vec>> pts;
  pts.reserve(static_cast<std::size_t>(std::max(grid_budget, 0)) + static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) {
    Vec e = Vec::Zero(p);
    e(i) = 1.0;
    pts.emplace_back(e.dot(b * e), e);
  }
  for (int t = 0; t < grid_budget; ++t) {
    Vec x(p);
    for (Index i = 0; i < p; ++i) x(i) = nd(rng);
    x = normalize_q(x, q);
    pts.emplace_back(x.dot(b * x), x);
  }
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& c) { return a.first > c.first; });
  double best = 0.0;
  const std::size_t starts = std::min<std::size_t>(pts.size(), 40);
  for (std::size_t s = 0; s < starts; ++s) {
    Vec x = pts[s].second;
    power_ascent(b, x, q, 2000);
    best = std::max(best, x.dot(b * x));
  }
  return std::sqrt(std::max(0.0, best));
}

NormEstimate q_to_qstar_psd_oracle(const Mat& b, const Exponent& q, int rounds, std::uint64_t seed) {
  return psd_oracle_impl(b, q, rounds, seed);
}

NormEstimate q_to_2_lower_bound(const Mat& m, const Exponent& q, int rounds, std::uint64_t seed) {
  require_finite(m, "matrix");
  const Mat b = m.transpose() * m;
  NormEstimate e = psd_oracle_impl(symmetrize(b), q, rounds, seed);
  NormEstimate out;
  out.witness = e.witness;
  out.lower_bound = e.witness.size() ? (m * e.witness).norm() : 0.0;
  out.upper_bound = std::max(std::sqrt(std::max(0.0, e.upper_bound)), out.lower_bound);
  out.approx_factor = std::sqrt(e.approx_factor);
  return out;
}

SeparationResult norm_separation_oracle(const Mat& x_in, const RobustnessBudget& budget, double rhs,
                                        int rounds, std::uint64_t seed) {
  const Mat x = checked_symmetric(x_in, "separation input");
  const Exponent& q = budget.q();
  const double factor = psd_oracle_factor(q);
  SeparationResult res;
  res.rhs = rhs;

  auto hyperplane = [&](const Vec& w) {
    res.kind = SeparationResult::Kind::Hyperplane;
    res.x = w;
    res.y = w;
    res.Z = w * w.transpose();
    res.value = w.dot(x * w);
    return res;
  };

  if (x.rows() == 0 || x.cwiseAbs().maxCoeff() == 0.0) {
    res.bound = 0.0;
    return res;
  }
  const Mat xc = clip_psd(x);
  {
    Vec w;
    heuristic_witness(xc, q, w);
    if (w.size() && w.dot(x * w) > rhs) return hyperplane(w);
  }
  for (int attempt = 0; attempt < 3; ++attempt) {
    const NormEstimate est = psd_oracle_impl(xc, q, rounds << (2 * attempt), derive_seed(seed, attempt));
    if (est.witness.size() && est.witness.dot(x * est.witness) > rhs) return hyperplane(est.witness);
    if (est.upper_bound <= factor * rhs) {
      res.bound = est.upper_bound;
      return res;
    }
  }
  fail(ErrorCode::SolverFailure, "separation oracle could neither certify nor separate");
}

}  // namespace robsub
