#pragma once

#include <vector>

#include "popspace/opnorm.hpp"

namespace popspace {

// A k-dimensional subspace E of l_p^m given by a full-rank m x k basis.
// Norms of elements of E are always the ambient l_p^m norms.
struct SubspaceEmbedding {
  Index ambient_dim = 0;  // m
  Index dim = 0;          // k
  Matrix basis;           // m x k, columns span E
  double p = 2.0;

  SubspaceEmbedding(Matrix basis_in, const Exponent& e);
  Exponent exponent() const { return Exponent(p); }
  // coefficients -> ambient vector
  Vector lift(const Vector& coeffs) const { return basis * coeffs; }
  // relative distance of an ambient vector from the span
  double span_residual(const Vector& x) const;
};

// An n x n matrix over the column space: each entry is an ambient vector
// of length entry_dim. The norm is the operator p-norm of the stacked
// (n * entry_dim) x n matrix S with S[(i,t), j] = entries[i*n+j][t].
struct ColumnMatrix {
  Index n = 0;
  Index entry_dim = 0;
  std::vector<Vector> entries;  // row-major, n*n ambient vectors

  Matrix stacked() const;
  static ColumnMatrix from_stacked(const Matrix& s, Index entry_dim);
};

// Lower estimate of sup { (sum_i ||sum_j lambda_j xi_ij||_p^p)^{1/p} :
// ||lambda||_p <= 1 } via the operator-norm ascent on the stacked matrix.
NormEstimate col_matrix_norm(const ColumnMatrix& x, const Exponent& e,
                             int restarts = 8, std::uint64_t seed = 42);

// Certified upper for the same quantity.
double col_matrix_norm_upper(const ColumnMatrix& x, const Exponent& e);

struct EmbeddingConsistencyReport {
  int trials = 0;
  double max_deviation = 0.0;
  bool ok = true;
};

// The column norm computed from coefficient data (lifted through the
// basis inside the objective) must match the norm of the stored ambient
// entries: the inclusion into the ambient column space is isometric.
EmbeddingConsistencyReport check_column_embedding_isometry(
    const SubspaceEmbedding& emb, Index n, int trials, std::uint64_t seed);

// The operator T_xi on C (+)_p l_p^m sending lambda (+) e to 0 (+)
// lambda xi, as (scalar part, vector part).
std::pair<Scalar, Vector> phi_apply(const Vector& xi, Scalar lambda,
                                    const Vector& e_vec);

// T_xi as the (m+1) x (m+1) matrix acting on (lambda, e)
Matrix phi_operator(const Vector& xi);

struct PsiResult {
  Vector value;  // the E-block of T(1 (+) 0)
  bool in_subspace = true;
  double residual = 0.0;
};

// pi T (1 (+) 0): apply T to the unit scalar slot, drop the scalar
// coordinate. Warns (rather than failing) when the result leaves the
// subspace, which happens for T without the harness block structure.
PsiResult psi_apply(const Matrix& t, const SubspaceEmbedding& emb,
                    double tol = 1e-9);

struct ContractionViolation {
  int level = 0;
  long long trial = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string which;
};

struct PhiPsiReport {
  int n_max = 0;
  long long trials = 0;
  double max_phi_ratio = 0.0;  // certified-lower(phi_n x) / certified-upper(x)
  double max_psi_ratio = 0.0;
  double roundtrip_deviation = 0.0;  // psi(phi(xi)) vs xi, exact algebra
  std::vector<ContractionViolation> violations;
  bool ok() const { return violations.empty() && roundtrip_deviation == 0.0; }
};

// Amplified contraction checks for phi and psi plus the exact
// psi-after-phi identity. Only certified-lower vs certified-upper
// comparisons count as violations.
PhiPsiReport check_phi_psi_contractive(const SubspaceEmbedding& emb,
                                       int n_max, int trials,
                                       std::uint64_t seed, double tol = 1e-6);

struct ProjectionSearchResult {
  double best_upper = 0.0;  // smallest certified upper bound found
  Matrix projection;        // the achieving P = B G
  int restarts = 0;
  int iterations = 0;
};

// Searches the affine family of projections onto span(basis),
// G = B^+ + Z N with rows of N spanning the left null space, minimizing
// the certified upper bound of ||P||_{p->p}. The result is an upper
// bound on the relative projection constant.
ProjectionSearchResult projection_constant(const SubspaceEmbedding& emb,
                                           int restarts = 32,
                                           int iterations = 200,
                                           std::uint64_t seed = 42);

struct CounterexampleOptions {
  int n_max = 3;
  int trials = 25;
  int restarts = 32;
  int iterations = 200;
  std::uint64_t seed = 42;
  double tol = 1e-6;
};

struct CounterexampleReport {
  PhiPsiReport phi_psi;
  ProjectionSearchResult projection;
  bool one_complemented = false;  // best projection norm within tol of 1
  double margin = 0.0;            // best - 1 when positive
  std::vector<std::string> flags;
};

// Packages the finite-scale shadow of the non-extension obstruction:
// phi/psi contraction results together with the projection-constant
// search and its observed margin above 1.
CounterexampleReport counterexample_report(const SubspaceEmbedding& emb,
                                           const CounterexampleOptions& opts);

}  // namespace popspace
