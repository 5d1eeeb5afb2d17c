#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace robsub {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

// Norm exponent in [1, inf]. Infinity is a distinct state, not a large float.
class Exponent {
 public:
  explicit Exponent(double q);
  static Exponent infinity() { return Exponent(); }

  bool is_infinite() const noexcept { return inf_; }
  // +inf when infinite.
  double value() const noexcept;
  // q/(q-1); dual of inf is 1 and dual of 1 is inf.
  Exponent dual() const;
  // 1/q, with 1/inf = 0.
  double reciprocal() const noexcept { return inf_ ? 0.0 : 1.0 / q_; }

  bool operator==(const Exponent& o) const noexcept {
    return inf_ == o.inf_ && (inf_ || q_ == o.q_);
  }

 private:
  Exponent() : q_(0.0), inf_(true) {}
  double q_;
  bool inf_;
};

std::string to_string(const Exponent& q);
Exponent parse_exponent(const std::string& text);

// (q, kappa) with q in [2, inf] and kappa >= 1.
class RobustnessBudget {
 public:
  RobustnessBudget(Exponent q, double kappa);
  const Exponent& q() const noexcept { return q_; }
  Exponent q_star() const { return q_.dual(); }
  double kappa() const noexcept { return kappa_; }

 private:
  Exponent q_;
  double kappa_;
};

// n x m, columns are samples; n, m >= 1 and entries finite.
class DataMatrix {
 public:
  DataMatrix(Mat entries);
  Index n() const noexcept { return a_.rows(); }
  Index m() const noexcept { return a_.cols(); }
  const Mat& mat() const noexcept { return a_; }
  auto col(Index j) const { return a_.col(j); }

 private:
  Mat a_;
};

// Orthogonal projection stored as an n x r orthonormal basis (r may be 0).
class Projection {
 public:
  explicit Projection(Index n);
  // Checks orthonormality within 1e-8.
  static Projection from_orthonormal(Mat basis);

  Index dim() const noexcept { return basis_.rows(); }
  Index rank() const noexcept { return basis_.cols(); }
  const Mat& basis() const noexcept { return basis_; }
  Mat matrix() const;
  Mat apply(const Mat& a) const;
  Vec apply(const Vec& v) const;

 private:
  Projection(Mat basis, bool);
  Mat basis_;
};

void require_finite(const Mat& a, const char* what);

Projection orthonormalize(const Mat& raw_basis);
DataMatrix apply_projection(const Projection& p, const DataMatrix& a);
double sin_theta_sq(const Projection& p1, const Projection& p2);

// Projection onto the top-r eigenvectors of a symmetric matrix.
Projection top_eigenprojection(const Mat& sym, Index r);

// Deterministic stream splitting for seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace robsub
