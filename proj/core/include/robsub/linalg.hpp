#pragma once

#include "robsub/matcore.hpp"

namespace robsub {

// Eigenvalues in descending order, vectors as matching columns.
struct SymEig {
  Vec values;
  Mat vectors;
};

SymEig sym_eig(const Mat& sym);
// Only eigenpairs with eigenvalue > lower, descending.
SymEig sym_eig_above(const Mat& sym, double lower);
// The k largest eigenpairs, descending.
SymEig sym_eig_top(const Mat& sym, Index k);
Vec sym_eigenvalues(const Mat& sym);

double lambda_max(const Mat& sym);
double lambda_min(const Mat& sym);

// Largest singular value of an arbitrary matrix.
double spectral_norm(const Mat& a);

inline Mat symmetrize(const Mat& a) { return 0.5 * (a + a.transpose()); }

}  // namespace robsub
