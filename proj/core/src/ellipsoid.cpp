#include <cmath>
#include <limits>

#include "robsub/error.hpp"
#include "robsub/linalg.hpp"
#include "robsub/opnorms.hpp"
#include "sdp_internal.hpp"

namespace robsub::detail {

namespace {

// Affine chart X = X0 + sum_j z_j M_j over symmetric matrices (trace-zero
// directions when the trace is pinned), with orthonormal M_j.
Mat chart_basis(Index n, bool trace_equal) {
  const Index d = n * (n + 1) / 2;
  Mat full = Mat::Zero(n * n, d);
  Index j = 0;
  for (Index a = 0; a < n; ++a) {
    for (Index b = a; b < n; ++b, ++j) {
      if (a == b) {
        full(a + a * n, j) = 1.0;
      } else {
        full(a + b * n, j) = M_SQRT1_2;
        full(b + a * n, j) = M_SQRT1_2;
      }
    }
  }
  if (!trace_equal) return full;
  // Drop the identity direction.
  Vec id = Mat::Identity(n, n).reshaped();
  id /= id.norm();
  Mat coords = full.transpose() * id;  // d x 1
  Eigen::HouseholderQR<Mat> qr(coords);
  const Mat q = qr.householderQ() * Mat::Identity(d, d);
  return full * q.rightCols(d - 1);
}

}  // namespace

PsdSolution solve_ellipsoid(const Program& p, const SolveParams& prm) {
  require(p.n <= 6, ErrorCode::TooLarge, "reference ellipsoid solver is limited to n <= 6");
  if (p.scale == 0.0 || p.r == 0) return finalize(p, initial_point(p), prm);

  const Index n = p.n;
  const bool spectral = p.kind == ProgramKind::Spectral;
  const Mat basis = chart_basis(n, p.trace_equal);
  const Index nx = basis.cols();
  const Index dim = nx + (spectral ? 1 : 0);
  const Mat x0 = initial_point(p);
  if (dim == 0) return finalize(p, x0, prm);

  const double r = static_cast<double>(p.r);
  const double tol = 1e-10;

  Vec c = Vec::Zero(dim);
  double rad2 = r;
  if (spectral) {
    c(nx) = 0.5;
    rad2 += 0.25;
  }
  Mat shape = Mat::Identity(dim, dim) * (rad2 * 1.1);

  auto point = [&](const Vec& z) {
    Mat x = x0 + (basis * z.head(nx)).reshaped(n, n);
    return symmetrize(x);
  };
  auto coeffs = [&](const Mat& g) {
    Vec a = Vec::Zero(dim);
    a.head(nx) = basis.transpose() * g.reshaped();
    return a;
  };

  Vec obj = Vec::Zero(dim);
  if (spectral) obj(nx) = 1.0;
  else obj.head(nx) = -(basis.transpose() * p.W.reshaped());
  const double obj_const = spectral ? 0.0 : -p.W.cwiseProduct(x0).sum();

  double best = std::numeric_limits<double>::infinity();
  Mat best_x = x0;
  double lower = -std::numeric_limits<double>::infinity();
  const double gap_tol = 1e-2 * prm.tol_objective * p.fro2 / p.scale;
  const long cap = std::max<long>(prm.max_iterations, 100L * dim * (dim + 1));
  long it = 0;
  bool done = false;
  std::uint64_t oracle_calls = 0;

  for (; it < cap; ++it) {
    const Mat x = point(c);
    Vec a;
    double beta = 0.0;
    bool cut = false;

    const SymEig e = sym_eig(x);
    if (e.values(n - 1) < -tol) {
      const Vec v = e.vectors.col(n - 1);
      const Mat g = -(v * v.transpose());
      a = coeffs(g);
      beta = -g.cwiseProduct(x0).sum();
      cut = true;
    } else if (e.values(0) > 1.0 + tol) {
      const Vec v = e.vectors.col(0);
      const Mat g = v * v.transpose();
      a = coeffs(g);
      beta = 1.0 - g.cwiseProduct(x0).sum();
      cut = true;
    } else if (!p.trace_equal && x.trace() > r + tol) {
      a = coeffs(Mat::Identity(n, n));
      beta = r;
      cut = true;
    } else if (p.entrywise && entrywise_norm(x, p.qs) > p.ent_radius * (1.0 + tol)) {
      // Gradient of the entrywise norm; <G, Y> <= ||Y||_{q*} for every Y.
      const double nrm = entrywise_norm(x, p.qs);
      Mat g;
      if (p.qs.value() == 1.0) {
        g = x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
      } else {
        const double s = p.qs.value();
        g = x.unaryExpr([&](double v) {
          return std::copysign(std::pow(std::abs(v) / nrm, s - 1.0), v);
        });
      }
      a = coeffs(g);
      beta = p.ent_radius - g.cwiseProduct(x0).sum();
      cut = true;
    }

    double spec_val = 0.0;
    Vec spec_vec;
    if (!cut && spectral) {
      const SymEig m = sym_eig(symmetrize(p.L.transpose() * (Mat::Identity(n, n) - x) * p.L));
      spec_val = m.values(0);
      spec_vec = p.L * m.vectors.col(0);
      if (spec_val > c(nx) + tol) {
        // v^T L^T (I - X) L v <= lambda, i.e. -<L v v^T L^T, X> - lambda <= -|L v|^2.
        a = coeffs(-(spec_vec * spec_vec.transpose()));
        a(nx) = -1.0;
        beta = -spec_vec.squaredNorm() + spec_vec.dot(x0 * spec_vec);
        cut = true;
      }
    }

    if (!cut && !(p.q.value() == 2.0)) {
      const NormEstimate est = q_to_qstar_psd_oracle(clip_psd(x), p.q, prm.oracle_rounds,
                                                     derive_seed(prm.seed, oracle_calls++));
      if (est.lower_bound > p.kappa2 * (1.0 + tol)) {
        const Vec& w = est.witness;
        const Mat g = w * w.transpose();
        a = coeffs(g);
        beta = p.kappa2 - g.cwiseProduct(x0).sum();
        cut = true;
      }
    }

    if (!cut) {
      // Feasible center: record it and cut on the objective.
      const double f = spectral ? spec_val : obj.dot(c) + obj_const;
      if (f < best) {
        best = f;
        best_x = x;
      }
      a = obj;
      beta = obj.dot(c) - (spectral ? c(nx) - best : f - best);
    }

    const double lo = obj.dot(c) + obj_const - std::sqrt(std::max(0.0, obj.dot(shape * obj)));
    lower = std::max(lower, lo);
    if (best - lower <= gap_tol) {
      done = true;
      break;
    }

    const double aPa = a.dot(shape * a);
    if (!(aPa > 0.0)) break;
    const double sq = std::sqrt(aPa);
    double alpha = (a.dot(c) - beta) / sq;
    if (alpha >= 1.0) break;  // empty: rounding has pushed the ellipsoid off the set
    alpha = std::max(alpha, 0.0);
    const Vec b = shape * a / sq;
    const double nd = static_cast<double>(dim);
    c -= (1.0 + nd * alpha) / (nd + 1.0) * b;
    if (dim == 1) {
      shape *= 0.25 * (1.0 - alpha) * (1.0 - alpha);
    } else {
      const double sig = 2.0 * (1.0 + nd * alpha) / ((nd + 1.0) * (1.0 + alpha));
      const double del = nd * nd * (1.0 - alpha * alpha) / (nd * nd - 1.0);
      shape = del * (shape - sig * b * b.transpose());
      shape = symmetrize(shape);
    }
  }

  PsdSolution sol = finalize(p, best_x, prm);
  sol.iteration_limit = !done;
  sol.iterations = static_cast<int>(it);
  return sol;
}

}  // namespace robsub::detail
