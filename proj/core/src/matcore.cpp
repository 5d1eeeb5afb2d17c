#include "robsub/matcore.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "robsub/error.hpp"
#include "robsub/linalg.hpp"

namespace robsub {

Exponent::Exponent(double q) : q_(q), inf_(false) {
  if (std::isinf(q) && q > 0) {
    inf_ = true;
    q_ = 0.0;
    return;
  }
  require(std::isfinite(q) && q >= 1.0, ErrorCode::InvalidParams, "exponent must lie in [1, inf]");
}

double Exponent::value() const noexcept {
  return inf_ ? std::numeric_limits<double>::infinity() : q_;
}

Exponent Exponent::dual() const {
  if (inf_) return Exponent(1.0);
  if (q_ == 1.0) return infinity();
  return Exponent(q_ / (q_ - 1.0));
}

std::string to_string(const Exponent& q) {
  if (q.is_infinite()) return "inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), q.value());
  return std::string(buf, res.ptr);
}

Exponent parse_exponent(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return Exponent::infinity();
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  require(res.ec == std::errc() && res.ptr == text.data() + text.size(), ErrorCode::ConfigError,
          "cannot parse exponent '" + text + "'");
  return Exponent(v);
}

RobustnessBudget::RobustnessBudget(Exponent q, double kappa) : q_(q), kappa_(kappa) {
  require(q.is_infinite() || q.value() >= 2.0, ErrorCode::InvalidParams, "budget exponent q must be >= 2");
  require(std::isfinite(kappa) && kappa >= 1.0, ErrorCode::InvalidParams, "kappa must be >= 1");
}

void require_finite(const Mat& a, const char* what) {
  require(a.allFinite(), ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

DataMatrix::DataMatrix(Mat entries) : a_(std::move(entries)) {
  require(a_.rows() >= 1 && a_.cols() >= 1, ErrorCode::InvalidParams, "data matrix needs n, m >= 1");
  require_finite(a_, "data matrix");
}

Projection::Projection(Index n) : basis_(n, 0) {}

Projection::Projection(Mat basis, bool) : basis_(std::move(basis)) {}

Projection Projection::from_orthonormal(Mat basis) {
  require_finite(basis, "projection basis");
  const Index r = basis.cols();
  if (r > 0) {
    const double err = (basis.transpose() * basis - Mat::Identity(r, r)).cwiseAbs().maxCoeff();
    require(err <= 1e-8, ErrorCode::InvalidParams, "projection basis is not orthonormal");
  }
  return Projection(std::move(basis), true);
}

Mat Projection::matrix() const { return basis_ * basis_.transpose(); }

Mat Projection::apply(const Mat& a) const {
  require(a.rows() == dim(), ErrorCode::DimensionMismatch, "projection dimension mismatch");
  if (rank() == 0) return Mat::Zero(a.rows(), a.cols());
  return basis_ * (basis_.transpose() * a);
}

Vec Projection::apply(const Vec& v) const {
  require(v.size() == dim(), ErrorCode::DimensionMismatch, "projection dimension mismatch");
  if (rank() == 0) return Vec::Zero(v.size());
  return basis_ * (basis_.transpose() * v);
}

namespace {

// Largest-magnitude entry positive, first index on ties.
void fix_signs(Mat& basis) {
  for (Index j = 0; j < basis.cols(); ++j) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < basis.rows(); ++i) {
      if (std::abs(basis(i, j)) > best + 1e-12) {
        best = std::abs(basis(i, j));
        arg = i;
      }
    }
    if (basis(arg, j) < 0) basis.col(j) *= -1.0;
  }
}

}  // namespace

Projection orthonormalize(const Mat& raw_basis) {
  require_finite(raw_basis, "raw basis");
  const Index n = raw_basis.rows();
  if (raw_basis.cols() == 0 || raw_basis.cwiseAbs().maxCoeff() == 0.0) return Projection(n);
  Eigen::JacobiSVD<Mat> svd(raw_basis, Eigen::ComputeThinU);
  const Vec& s = svd.singularValues();
  const double cut = 1e-10 * s(0);
  Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  Mat basis = svd.matrixU().leftCols(rank);
  fix_signs(basis);
  return Projection::from_orthonormal(std::move(basis));
}

DataMatrix apply_projection(const Projection& p, const DataMatrix& a) {
  require(p.dim() == a.n(), ErrorCode::DimensionMismatch, "projection and data dimensions differ");
  return DataMatrix(p.apply(a.mat()));
}

double sin_theta_sq(const Projection& p1, const Projection& p2) {
  require(p1.dim() == p2.dim(), ErrorCode::DimensionMismatch, "sin_theta_sq dimension mismatch");
  if (p2.rank() == 0) return 0.0;
  const Mat& b2 = p2.basis();
  if (p1.rank() == 0) return b2.squaredNorm();
  const Mat& b1 = p1.basis();
  const Mat resid = b2 - b1 * (b1.transpose() * b2);
  return resid.squaredNorm();
}

Projection top_eigenprojection(const Mat& sym, Index r) {
  require(sym.rows() == sym.cols(), ErrorCode::DimensionMismatch, "top_eigenprojection needs a square matrix");
  require(r >= 0 && r <= sym.rows(), ErrorCode::InvalidParams, "rank out of range");
  if (r == 0) return Projection(sym.rows());
  const SymEig e = sym_eig(sym);
  Mat basis = e.vectors.leftCols(r);
  fix_signs(basis);
  return Projection::from_orthonormal(std::move(basis));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace robsub
