#include "robsub/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "robsub/error.hpp"

namespace robsub {

namespace {

SymEig reversed(Vec w, Mat z) {
  const Index k = w.size();
  SymEig out{Vec(k), Mat(z.rows(), k)};
  for (Index i = 0; i < k; ++i) {
    out.values(i) = w(k - 1 - i);
    out.vectors.col(i) = z.col(k - 1 - i);
  }
  return out;
}

}  // namespace

SymEig sym_eig(const Mat& sym) {
  const Index n = sym.rows();
  require(sym.cols() == n, ErrorCode::DimensionMismatch, "sym_eig needs a square matrix");
  if (n == 0) return {Vec(0), Mat(0, 0)};
  Mat a = symmetrize(sym);
  Vec w(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(n),
                                         a.data(), static_cast<lapack_int>(n), w.data());
  require(info == 0, ErrorCode::SolverFailure, "dsyevd failed");
  return reversed(std::move(w), std::move(a));
}

SymEig sym_eig_above(const Mat& sym, double lower) {
  const Index n = sym.rows();
  require(sym.cols() == n, ErrorCode::DimensionMismatch, "sym_eig_above needs a square matrix");
  if (n == 0) return {Vec(0), Mat(0, 0)};
  Mat a = symmetrize(sym);
  const double upper = 2.0 * a.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  if (lower >= upper) return {Vec(0), Mat(n, 0)};
  Vec w(n);
  Mat z(n, n);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'V', 'U', static_cast<lapack_int>(n), a.data(),
      static_cast<lapack_int>(n), lower, upper, 0, 0, 0.0, &found, w.data(), z.data(),
      static_cast<lapack_int>(n), isuppz.data());
  require(info == 0, ErrorCode::SolverFailure, "dsyevr failed");
  return reversed(w.head(found), z.leftCols(found));
}

SymEig sym_eig_top(const Mat& sym, Index k) {
  const Index n = sym.rows();
  require(sym.cols() == n, ErrorCode::DimensionMismatch, "sym_eig_top needs a square matrix");
  k = std::min(k, n);
  if (k <= 0) return {Vec(0), Mat(n, 0)};
  if (2 * k >= n) {
    SymEig full = sym_eig(sym);
    return {full.values.head(k), full.vectors.leftCols(k)};
  }
  Mat a = symmetrize(sym);
  Vec w(n);
  Mat z(n, k);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(k));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'U', static_cast<lapack_int>(n), a.data(),
      static_cast<lapack_int>(n), 0.0, 0.0, static_cast<lapack_int>(n - k + 1),
      static_cast<lapack_int>(n), 0.0, &found, w.data(), z.data(), static_cast<lapack_int>(n),
      isuppz.data());
  require(info == 0 && found == k, ErrorCode::SolverFailure, "dsyevr failed");
  return reversed(w.head(found), z.leftCols(found));
}

Vec sym_eigenvalues(const Mat& sym) {
  const Index n = sym.rows();
  require(sym.cols() == n, ErrorCode::DimensionMismatch, "sym_eigenvalues needs a square matrix");
  if (n == 0) return Vec(0);
  Mat a = symmetrize(sym);
  Vec w(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', static_cast<lapack_int>(n),
                                         a.data(), static_cast<lapack_int>(n), w.data());
  require(info == 0, ErrorCode::SolverFailure, "dsyevd failed");
  return w.reverse();
}

double lambda_max(const Mat& sym) {
  if (sym.rows() == 0) return 0.0;
  return sym_eigenvalues(sym)(0);
}

double lambda_min(const Mat& sym) {
  if (sym.rows() == 0) return 0.0;
  const Vec w = sym_eigenvalues(sym);
  return w(w.size() - 1);
}

double spectral_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  const Mat g = a.rows() <= a.cols() ? Mat(a * a.transpose()) : Mat(a.transpose() * a);
  return std::sqrt(std::max(0.0, lambda_max(g)));
}

}  // namespace robsub
