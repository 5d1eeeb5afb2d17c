#include "robsub/sdpsolve.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "robsub/error.hpp"
#include "robsub/linalg.hpp"
#include "robsub/opnorms.hpp"
#include "sdp_internal.hpp"

namespace robsub {

void SolveParams::validate() const {
  require(tol_objective > 0.0 && std::isfinite(tol_objective), ErrorCode::InvalidParams,
          "tol_objective must be positive");
  require(tol_feasibility > 0.0 && std::isfinite(tol_feasibility), ErrorCode::InvalidParams,
          "tol_feasibility must be positive");
  require(max_iterations > 0, ErrorCode::InvalidParams, "max_iterations must be positive");
  require(gamma > 0.0 && gamma <= 1.0, ErrorCode::InvalidParams, "gamma must lie in (0, 1]");
  require(eta > 0.0 && std::isfinite(eta), ErrorCode::InvalidParams, "eta must be positive");
  require(tau >= 0.0 && std::isfinite(tau), ErrorCode::InvalidParams, "tau must be nonnegative");
  require(oracle_rounds > 0, ErrorCode::InvalidParams, "oracle_rounds must be positive");
}

namespace {

// Sum of clip(lambda_i - theta, 0, 1).
double capped_sum(const Vec& lam, double theta) {
  double s = 0.0;
  for (Index i = 0; i < lam.size(); ++i) s += std::clamp(lam(i) - theta, 0.0, 1.0);
  return s;
}

// Shift theta so the clipped spectrum satisfies the trace constraint.
Vec capped_spectrum(const Vec& lam, double r, bool trace_equal) {
  const Index n = lam.size();
  double theta = 0.0;
  if (r >= static_cast<double>(n)) {
    theta = trace_equal ? lam.minCoeff() - 1.0 : 0.0;
  } else if (trace_equal || capped_sum(lam, 0.0) > r) {
    double lo = lam.minCoeff() - 1.0;  // sum = n
    double hi = lam.maxCoeff();        // sum = 0
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (capped_sum(lam, mid) > r) lo = mid; else hi = mid;
    }
    theta = hi;
  }
  Vec out(n);
  for (Index i = 0; i < n; ++i) out(i) = std::clamp(lam(i) - theta, 0.0, 1.0);
  return out;
}

// V clip(lambda) V^T; factor gets V sqrt(clip) over the kept eigenvalues and
// top the leading eigenvectors.
Mat capped_projection(const Mat& vectors, const Vec& values, double r, bool trace_equal, Mat* top,
                      Mat* factor) {
  const Vec lam = capped_spectrum(values, r, trace_equal);
  if (top) *top = vectors.leftCols(std::min<Index>(3, vectors.cols()));
  std::vector<Index> keep;
  for (Index i = 0; i < lam.size(); ++i)
    if (lam(i) > 0.0) keep.push_back(i);
  Mat v(vectors.rows(), static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    v.col(static_cast<Index>(j)) = vectors.col(keep[j]) * std::sqrt(lam(keep[j]));
  Mat x = v * v.transpose();
  if (factor) *factor = std::move(v);
  return x;
}

// Projection onto the spectrahedron that also hands back the leading eigenvectors.
Mat project_with_basis(const Mat& y, double r, bool trace_equal, Mat* top, Mat* factor = nullptr) {
  const SymEig e = sym_eig(symmetrize(y));
  return capped_projection(e.vectors, e.values, r, trace_equal, top, factor);
}

// Same projection for y = Q Q^T y Q Q^T with orthonormal Q and tr X <= r: the
// zero eigenvalues outside span(Q) stay at zero.
Mat project_in_span(const Mat& y, const Mat& q, double r, Mat* top, Mat* factor) {
  const SymEig e = sym_eig(symmetrize(q.transpose() * y * q));
  return capped_projection(q * e.vectors, e.values, r, false, top, factor);
}

// Orthonormal basis for the column span, dropping dependent columns.
Mat span_basis(const Mat& s) {
  Eigen::ColPivHouseholderQR<Mat> qr(s);
  qr.setThreshold(1e-10);
  return qr.householderQ() * Mat::Identity(s.rows(), qr.rank());
}

double l1_ball_threshold(std::vector<double> a, double radius) {
  std::sort(a.begin(), a.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cum += a[i];
    const double t = (cum - radius) / static_cast<double>(i + 1);
    if (a[i] - t > 0.0) theta = t;
  }
  return std::max(theta, 0.0);
}

// Solves z + lam * p * z^(p-1) = a for z in [0, a].
double lp_prox_entry(double a, double lam, double p) {
  if (a == 0.0 || lam == 0.0) return a;
  double lo = 0.0, hi = a;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid + lam * p * std::pow(mid, p - 1.0) > a) hi = mid; else lo = mid;
    if (hi - lo <= 1e-15 * a) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Mat project_spectrahedron(const Mat& y, double r, bool trace_equal) {
  require(y.rows() == y.cols(), ErrorCode::DimensionMismatch, "projection input must be square");
  require(r >= 0.0, ErrorCode::InvalidParams, "trace bound must be nonnegative");
  if (y.rows() == 0) return y;
  return project_with_basis(y, r, trace_equal, nullptr);
}

double entrywise_norm(const Mat& x, const Exponent& p) {
  return vector_norm(Eigen::Map<const Vec>(x.data(), x.size()), p);
}

Mat project_entrywise_ball(const Mat& y, const Exponent& p, double radius) {
  require(radius >= 0.0, ErrorCode::InvalidParams, "radius must be nonnegative");
  if (entrywise_norm(y, p) <= radius) return y;
  if (p.is_infinite()) return y.cwiseMax(-radius).cwiseMin(radius);
  const double pv = p.value();
  if (pv == 2.0) return y * (radius / y.norm());
  if (pv == 1.0) {
    std::vector<double> a(y.data(), y.data() + y.size());
    for (double& v : a) v = std::abs(v);
    const double theta = l1_ball_threshold(std::move(a), radius);
    return y.unaryExpr([theta](double v) {
      return v > theta ? v - theta : (v < -theta ? v + theta : 0.0);
    });
  }
  // Bisection on the multiplier of ||x||_p^p <= radius^p.
  const double target = std::pow(radius, pv);
  auto shrink = [&](double lam) {
    return Mat(y.unaryExpr([&](double v) { return std::copysign(lp_prox_entry(std::abs(v), lam, pv), v); }));
  };
  auto mass = [&](const Mat& x) { return x.cwiseAbs().array().pow(pv).sum(); };
  double lo = 0.0, hi = 1.0;
  while (mass(shrink(hi)) > target) hi *= 2.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mass(shrink(mid)) > target) lo = mid; else hi = mid;
    if (hi - lo <= 1e-14 * hi) break;
  }
  return shrink(hi);
}

namespace detail {

double Program::spectral_value(const Mat& x) const {
  if (scale == 0.0) return 0.0;
  const Mat g = L.transpose() * (Mat::Identity(n, n) - x) * L;
  return lambda_max(symmetrize(g));
}

double Program::objective(const Mat& x) const {
  if (scale == 0.0) return 0.0;
  switch (kind) {
    case ProgramKind::Frobenius:
      return std::max(0.0, fro2 - scale * W.cwiseProduct(x).sum());
    case ProgramKind::Spiked:
      return std::max(0.0, fro2 - scale * W.cwiseProduct(x).sum()) / m;
    case ProgramKind::Spectral:
      return std::max(0.0, scale * spectral_value(x));
  }
  return 0.0;
}

Program make_program(ProgramKind kind, const DataMatrix& a, Index r, const RobustnessBudget& budget) {
  require(r >= 0 && r <= a.n(), ErrorCode::InvalidParams, "rank must lie in [0, n]");
  Program p;
  p.kind = kind;
  p.n = a.n();
  p.r = r;
  p.m = static_cast<double>(a.m());
  p.fro2 = a.mat().squaredNorm();
  const double sn = spectral_norm(a.mat());
  p.scale = sn * sn;
  p.q = budget.q();
  p.kappa2 = budget.kappa() * budget.kappa();
  p.factor = psd_oracle_factor(budget.q());
  if (kind == ProgramKind::Spiked) {
    p.trace_equal = true;
    p.entrywise = true;
    p.qs = budget.q_star();
    p.ent_radius = static_cast<double>(r) * p.kappa2;
  }
  if (p.scale > 0.0) {
    p.W = symmetrize(a.mat() * a.mat().transpose()) / p.scale;
    if (kind == ProgramKind::Spectral) {
      if (a.m() <= a.n()) {
        p.L = a.mat() / sn;
      } else {
        const SymEig e = sym_eig_above(p.W, 1e-13);
        p.L = e.vectors * e.values.cwiseSqrt().asDiagonal();
      }
    }
  }
  return p;
}

Mat initial_point(const Program& p) {
  if (p.trace_equal && p.n > 0)
    return Mat::Identity(p.n, p.n) * (static_cast<double>(p.r) / static_cast<double>(p.n));
  return Mat::Zero(p.n, p.n);
}

PsdSolution finalize(const Program& p, Mat x, const SolveParams& params) {
  const double r = static_cast<double>(p.r);
  x = project_spectrahedron(symmetrize(x), r, p.trace_equal);
  const Mat x0 = initial_point(p);

  if (p.entrywise && entrywise_norm(x, p.qs) > p.ent_radius) {
    // Move toward (r/n) I until the entrywise bound holds.
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (entrywise_norm((1.0 - mid) * x + mid * x0, p.qs) > p.ent_radius) lo = mid; else hi = mid;
    }
    x = (1.0 - hi) * x + hi * x0;
  }

  const double cap = p.factor * p.kappa2;
  NormEstimate est = q_to_qstar_psd_oracle(x, p.q, params.oracle_rounds, derive_seed(params.seed, 0xf1a1ULL));
  double cert = est.upper_bound;
  if (cert > cap) {
    if (!p.trace_equal) {
      x *= cap / cert;
    } else {
      // ||(r/n) I||_{q->q*} = (r/n) n^(1-2/q).
      const double nn = static_cast<double>(p.n);
      const double u0 = r / nn * std::pow(nn, 1.0 - 2.0 * p.q.reciprocal());
      require(u0 < cap, ErrorCode::SolverFailure, "norm constraint cannot be certified with tr X = r");
      const double t = (cap - u0) / (cert - u0);
      x = t * x + (1.0 - t) * x0;
    }
    est = q_to_qstar_psd_oracle(x, p.q, params.oracle_rounds, derive_seed(params.seed, 0xf1a2ULL));
    cert = std::min(cap, est.upper_bound);
  }

  PsdSolution sol;
  sol.X = x;
  sol.norm_certificate = cert;
  sol.objective = p.objective(x);
  if (p.kind == ProgramKind::Spectral) sol.lambda = sol.objective;
  if (p.entrywise) {
    const double e = entrywise_norm(x, p.qs);
    sol.entrywise_certificate = p.qs.is_infinite() ? e : std::pow(e, p.qs.value());
  }
  return sol;
}

namespace {

// Augmented Lagrangian over the cut set, each subproblem solved by
// accelerated projected gradient on the spectrahedron.
class AlmSolver {
 public:
  AlmSolver(const Program& p, const SolveParams& prm) : p_(p), prm_(prm), n_(p.n) {
    eps_f_ = prm.tol_objective * p.fro2 / p.scale;
    if (p.kind == ProgramKind::Spectral) {
      LtL_ = symmetrize(p.L.transpose() * p.L);
      logp_ = std::log(static_cast<double>(std::max<Index>(p.L.cols(), 2)));
      smooth_min_ = eps_f_ / (4.0 * logp_);
      // Start the smoothing at a fraction of the unconstrained optimum.
      const Vec lw = sym_eigenvalues(p.W);
      const double base = p.r < lw.size() ? lw(p.r) : 0.0;
      smooth_ = std::max(smooth_min_, 0.05 * std::max(base, 1e-3));
    }
    if (p.entrywise) lam_e_ = Mat::Zero(n_, n_);
    cuts_ = Mat(n_, 0);
    update_bounds();
  }

  PsdSolution run() {
    const double r = static_cast<double>(p_.r);
    const bool spectral = p_.kind == ProgramKind::Spectral;
    // The spectral iterates, their gradients and the cuts are all low rank, so
    // the projection can work inside their joint span.
    const bool low_rank = spectral && !p_.trace_equal && !p_.entrywise;
    // Warm start at the top-r eigenprojector of W, the unconstrained optimum.
    const SymEig we = sym_eig_top(p_.W, p_.r);
    Mat xf = we.vectors;
    Mat x = xf * xf.transpose();
    Mat y = x;
    Mat xf_prev(n_, 0);
    double t = 1.0;
    Mat top;
    double viol_prev = std::numeric_limits<double>::infinity();
    int inner = 0;
    int iter = 0;
    int oracle_calls = 0;
    bool converged = false;
    const double eps_in = std::max(1e-9, 0.1 * eps_f_);

    while (iter < prm_.max_iterations) {
      double fy = 0.0;
      double fy_exact = 0.0;
      Mat vfac;
      const Mat gobj = objective_gradient(y, fy, &fy_exact, low_rank ? &vfac : nullptr);
      Mat gpen;
      const double pen_y = penalty(y, &gpen);
      const Mat grad = gobj + gpen;
      Mat q;
      if (low_rank) {
        Mat span(n_, xf.cols() + xf_prev.cols() + vfac.cols() + cuts_.cols());
        span << xf, xf_prev, vfac, cuts_;
        if (2 * span.cols() < n_) q = span_basis(span);
      }
      const double lobj = spectral ? 1.0 / smooth_ : 0.0;
      Mat xn;
      Mat xfn;
      double lip = 1.0;
      // Backtracking on the penalty curvature; the objective part is exact.
      for (;;) {
        lip = std::max(1.0, lobj + lpen_);
        const Mat target = y - grad / lip;
        xn = q.cols() > 0 ? project_in_span(target, q, r, &top, &xfn)
                          : project_with_basis(target, r, p_.trace_equal, &top, &xfn);
        if (lpen_ >= lpen_max_) break;
        const Mat d = xn - y;
        const double model = pen_y + gpen.cwiseProduct(d).sum() + 0.5 * lpen_ * d.squaredNorm();
        if (penalty(xn, nullptr) <= model + 1e-13 * std::max(1.0, std::abs(pen_y))) break;
        lpen_ = std::min(std::max(2.0 * lpen_, 1e-3), lpen_max_);
      }
      lpen_ *= 0.9;
      const double gmap = lip * (xn - y).norm();
      if ((y - xn).cwiseProduct(xn - x).sum() > 0.0) t = 1.0;  // adaptive restart
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = xn + ((t - 1.0) / tn) * (xn - x);
      x = std::move(xn);
      xf_prev = std::move(xf);
      xf = std::move(xfn);
      t = tn;
      ++iter;
      ++inner;
      history_.push_back(fy_exact);
      if (history_.size() > 51) history_.pop_front();
      if (gmap > eps_in && inner < inner_limit_) continue;
      const bool inner_done = gmap <= eps_in;

      // Multiplier step.
      inner = 0;
      const double viol = update_multipliers(x);
      // Raise the penalty only when an accurately solved subproblem with a
      // fixed cut set still leaves the violation stuck.
      if (inner_done && !cut_added_ && viol > prm_.tol_feasibility && viol > 0.5 * viol_prev) {
        rho_ = std::min(rho_ * 2.0, 1e4);
        update_bounds();
      }
      cut_added_ = false;
      viol_prev = viol;
      t = 1.0;
      y = x;

      double upper = 0.0;
      const double lower = dual_lower(x, upper);
      const double gap = upper - lower;
      const bool stalled = history_.size() > 50 && std::abs(history_.back() - history_.front()) <= eps_f_;
      if (spectral && smooth_ > smooth_min_ && (inner_done || stalled || smooth_ * logp_ >= 0.5 * gap)) {
        smooth_ = std::max(smooth_ * 0.25, smooth_min_);
        history_.clear();
      }

      // Cheap separation from the leading eigenvectors; at q = 2 the
      // constraint lambda_max(X) <= kappa^2 is implied by X <= I.
      if (p_.q.is_infinite() || p_.q.value() != 2.0) {
        Vec w;
        const double hv = heuristic_witness(x, p_.q, top, w);
        if (hv > p_.kappa2 * (1.0 + cut_tol()) && add_cut(w)) continue;
      }
      if (viol > prm_.tol_feasibility) continue;
      const bool smooth_done = !spectral || smooth_ <= smooth_min_;
      if (gap > eps_f_ && !(stalled && smooth_done)) continue;
      if (p_.q.is_infinite() || p_.q.value() != 2.0) {
        const NormEstimate est = q_to_qstar_psd_oracle(
            clip_psd(symmetrize(x)), p_.q, prm_.oracle_rounds,
            derive_seed(prm_.seed, static_cast<std::uint64_t>(oracle_calls++)));
        if (est.lower_bound > p_.kappa2 * (1.0 + cut_tol()) && add_cut(est.witness)) continue;
      }
      converged = true;
      break;
    }

    PsdSolution sol = finalize(p_, x, prm_);
    sol.iteration_limit = !converged;
    sol.iterations = iter;
    sol.cuts = static_cast<int>(cuts_.cols());
    return sol;
  }

 private:
  double cut_tol() const { return std::max(prm_.tol_feasibility, 1e-9); }

  // Gradient of the (smoothed) objective; f receives its value.
  Mat objective_gradient(const Mat& x, double& f, double* exact = nullptr, Mat* factor = nullptr) const {
    if (p_.kind != ProgramKind::Spectral) {
      f = -p_.W.cwiseProduct(x).sum();
      if (exact) *exact = f;
      return -p_.W;
    }
    const Mat m = symmetrize(LtL_ - p_.L.transpose() * x * p_.L);
    const SymEig e = sym_eig(m);
    const double l1 = e.values(0);
    if (exact) *exact = l1;
    Vec w = ((e.values.array() - l1) / smooth_).exp().matrix();
    const double s = w.sum();
    f = l1 + smooth_ * std::log(s);
    w /= s;
    Index k = 0;
    while (k < w.size() && w(k) > 1e-14) ++k;
    Mat v = p_.L * (e.vectors.leftCols(k) * w.head(k).cwiseSqrt().asDiagonal());
    Mat g = -(v * v.transpose());
    if (factor) *factor = std::move(v);
    return g;
  }

  // Lagrangian lower bound on the optimum, valid for any multipliers; the cuts
  // and the entrywise ball are implied by the true constraints. upper gets the
  // unsmoothed objective at x.
  double dual_lower(const Mat& x, double& upper) const {
    Mat base = Mat::Zero(n_, n_);
    double shift = 0.0;
    if (cuts_.cols() > 0) {
      const Vec mu = Eigen::Map<const Vec>(mu_.data(), static_cast<Index>(mu_.size()));
      base += cuts_ * mu.asDiagonal() * cuts_.transpose();
      shift -= mu.dot(Eigen::Map<const Vec>(b_.data(), static_cast<Index>(b_.size())));
    }
    if (p_.entrywise) {
      base += lam_e_;
      shift -= p_.ent_radius * entrywise_norm(lam_e_, p_.qs.dual());
    }
    // min of <c, X> over the spectrahedron: the r smallest eigenvalues.
    auto lin_min = [&](const Mat& c) {
      const Vec lam = sym_eigenvalues(symmetrize(c));
      double v = 0.0;
      for (Index i = 0; i < std::min<Index>(p_.r, lam.size()); ++i) {
        const double e = lam(lam.size() - 1 - i);
        v += p_.trace_equal ? e : std::min(e, 0.0);
      }
      return v;
    };
    if (p_.kind != ProgramKind::Spectral) {
      upper = -p_.W.cwiseProduct(x).sum();
      return shift + lin_min(base - p_.W);
    }
    // lambda_max(M) >= <Z, M> = tr(L Z L^T) - <L Z L^T, X> for Z in the
    // spectraplex; Z is tried at a few temperatures of the softmax.
    const SymEig e = sym_eig(symmetrize(LtL_ - p_.L.transpose() * x * p_.L));
    upper = e.values(0);
    double best = -std::numeric_limits<double>::infinity();
    for (const double temp : {smooth_, std::sqrt(smooth_ * smooth_min_), smooth_min_, 0.0}) {
      Vec w = Vec::Zero(e.values.size());
      if (temp > 0.0) w = ((e.values.array() - upper) / temp).exp().matrix();
      else w(0) = 1.0;
      w /= w.sum();
      Index k = 0;
      while (k < w.size() && w(k) > 1e-14) ++k;
      const Mat v = p_.L * (e.vectors.leftCols(k) * w.head(k).cwiseSqrt().asDiagonal());
      const Mat lzl = v * v.transpose();
      best = std::max(best, lzl.trace() + shift + lin_min(base - lzl));
    }
    return best;
  }

  // Augmented-Lagrangian penalty (up to constants) and optionally its gradient.
  double penalty(const Mat& x, Mat* grad) const {
    double val = 0.0;
    if (grad) *grad = Mat::Zero(n_, n_);
    if (cuts_.cols() > 0) {
      const Mat xu = x * cuts_;
      Vec c(cuts_.cols());
      for (Index k = 0; k < cuts_.cols(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double gk = cuts_.col(k).dot(xu.col(k)) - b_[kk];
        c(k) = std::max(0.0, mu_[kk] + rho_ * gk);
        val += c(k) * c(k) / (2.0 * rho_);
      }
      if (grad) *grad += cuts_ * c.asDiagonal() * cuts_.transpose();
    }
    if (p_.entrywise) {
      const Mat z = x + lam_e_ / rho_;
      const Mat d = z - project_entrywise_ball(z, p_.qs, p_.ent_radius);
      val += 0.5 * rho_ * d.squaredNorm();
      if (grad) *grad += rho_ * d;
    }
    return val;
  }

  // Returns the relative constraint violation at x.
  double update_multipliers(const Mat& x) {
    double viol = 0.0;
    if (cuts_.cols() > 0) {
      const Mat xu = x * cuts_;
      for (Index k = 0; k < cuts_.cols(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double gk = cuts_.col(k).dot(xu.col(k)) - b_[kk];
        mu_[kk] = std::max(0.0, mu_[kk] + rho_ * gk);
        viol = std::max(viol, gk / b_[kk]);
      }
    }
    if (p_.entrywise) {
      const Mat z = x + lam_e_ / rho_;
      lam_e_ = rho_ * (z - project_entrywise_ball(z, p_.qs, p_.ent_radius));
      viol = std::max(viol, entrywise_norm(x, p_.qs) / p_.ent_radius - 1.0);
    }
    return viol;
  }

  bool add_cut(const Vec& x) {
    const double nx = x.norm();
    if (!(nx > 0.0)) return false;
    const Vec u = x / nx;
    for (Index k = 0; k < cuts_.cols(); ++k)
      if (std::abs(cuts_.col(k).dot(u)) > 1.0 - 1e-10) return false;
    cuts_.conservativeResize(Eigen::NoChange, cuts_.cols() + 1);
    cuts_.col(cuts_.cols() - 1) = u;
    b_.push_back(p_.kappa2 / (nx * nx));
    mu_.push_back(0.0);
    cut_added_ = true;
    update_bounds();
    history_.clear();
    return true;
  }

  // Global curvature bound of the penalty, used to cap the backtracking.
  void update_bounds() {
    double l = 0.0;
    if (cuts_.cols() > 0) l += rho_ * lambda_max(Mat(cuts_.transpose() * cuts_));
    if (p_.entrywise) l += rho_;
    lpen_max_ = l;
    lpen_ = std::min(lpen_, lpen_max_);
  }

  const Program& p_;
  const SolveParams& prm_;
  Index n_;
  Mat LtL_;
  Mat cuts_;  // unit columns u_k; constraint u_k^T X u_k <= b_k
  std::vector<double> b_, mu_;
  Mat lam_e_;
  double rho_ = 10.0;
  double lpen_ = 0.0, lpen_max_ = 0.0;
  double smooth_ = 0.0, smooth_min_ = 0.0, logp_ = 1.0;
  std::deque<double> history_;
  double eps_f_ = 0.0;
  int inner_limit_ = 50;
  bool cut_added_ = false;
};

}  // namespace

PsdSolution solve_production(const Program& p, const SolveParams& params) {
  if (p.scale == 0.0 || p.r == 0) {
    PsdSolution sol = finalize(p, initial_point(p), params);
    return sol;
  }
  return AlmSolver(p, params).run();
}

}  // namespace detail

namespace {

PsdSolution dispatch(detail::ProgramKind kind, const DataMatrix& a, Index r,
                     const RobustnessBudget& budget, const SolveParams& params, SolverBackend backend) {
  params.validate();
  const detail::Program p = detail::make_program(kind, a, r, budget);
  return backend == SolverBackend::Production ? detail::solve_production(p, params)
                                              : detail::solve_ellipsoid(p, params);
}

}  // namespace

PsdSolution solve_frobenius_relax(const DataMatrix& a, Index r, const RobustnessBudget& budget,
                                  const SolveParams& params, SolverBackend backend) {
  return dispatch(detail::ProgramKind::Frobenius, a, r, budget, params, backend);
}

PsdSolution solve_spectral_relax(const DataMatrix& a, Index r, const RobustnessBudget& budget,
                                 const SolveParams& params, SolverBackend backend) {
  return dispatch(detail::ProgramKind::Spectral, a, r, budget, params, backend);
}

PsdSolution solve_spiked_relax(const DataMatrix& a, Index r, const RobustnessBudget& budget,
                               const SolveParams& params, SolverBackend backend) {
  return dispatch(detail::ProgramKind::Spiked, a, r, budget, params, backend);
}

}  // namespace robsub
