#pragma once

#include <vector>

#include "popspace/opnorm.hpp"

namespace popspace {

// indices i with |x_i| > tol * max_j |x_j|; empty for the zero vector
std::vector<Index> support(const Vector& x, double tol = 0.0);

struct IsometryCertificate {
  bool isometry = false;
  std::vector<std::vector<Index>> column_supports;
  std::vector<double> column_norms;
  double gram_residual = 0.0;  // p = 2 only: max |tau* tau - I|
  std::string reason;
};

// For p != 2: true iff the columns have mutually disjoint supports and
// each column p-norm is within tol of 1. At p = 2 disjoint supports are
// sufficient but not necessary, so the Gram identity (orthonormal
// columns) is checked instead. Throws if rows < cols: no isometry exists.
IsometryCertificate is_lp_isometry(const Matrix& tau, const Exponent& e,
                                   double tol = 1e-9);

// Projective row classes: each nonzero row is a scalar multiple of its
// class pivot. class_of[i] = -1 for rows in zero_rows.
struct RowGrouping {
  std::vector<Index> pivots;        // ascending row indices
  std::vector<int> class_of;        // per row: pivot class index, or -1
  std::vector<Scalar> scale_of;     // per row: c_i with u_i = c_i * u_pivot
  std::vector<Index> zero_rows;
};

// Greedy left-to-right scan matching rows against existing pivots by
// relative 2-norm residual after the best complex scaling.
RowGrouping group_rows(const Matrix& beta, double tol = 1e-9);

struct DecomposabilityReport {
  bool decomposable = false;
  int class_count = 0;
  std::vector<Index> pivots;
  std::vector<Index> zero_rows;
  bool full_rank = false;  // additionally rank(beta) = cols
  Index rank = 0;
  std::string reason;
};

// beta (r x n, r >= n) factors as isometry * square iff its nonzero rows
// fall into at most n projective classes
DecomposabilityReport is_polar_decomposable(const Matrix& beta,
                                            const Exponent& e,
                                            double tol = 1e-9);

struct PolarDecomposition {
  Matrix tau;    // r x n, passes is_lp_isometry at the same exponent
  Matrix beta0;  // n x n with tau * beta0 = beta
  RowGrouping grouping;
  std::vector<double> lambda;  // per tau column, the normalizing scale
};

// Constructs the decomposition from the row grouping. Classes are split
// across extra columns when fewer than n exist; all invariants
// (reconstruction, entrywise norm preservation, tau isometry) are
// verified before returning.
PolarDecomposition polar_decompose(const Matrix& beta, const Exponent& e,
                                   double tol = 1e-9);

}  // namespace popspace
