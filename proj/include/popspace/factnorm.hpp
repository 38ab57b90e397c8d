#pragma once

#include <optional>

#include "popspace/opnorm.hpp"

namespace popspace {

// A factorization v = alpha * w * beta witnessing an upper bound
// ||alpha||_{p'} * wUpper * ||beta||_p for the predual norm, where wUpper
// is a certified upper bound of the operator p-norm of w.
struct Factorization {
  Index r = 0;
  Matrix alpha;  // n x r
  Matrix w;      // r x r
  Matrix beta;   // r x n
  double w_upper = 0.0;
  double value = 0.0;
};

// A feasible dual functional: pairing(f, v) = |sum_ij f_ij v_ij| divided
// by a certified upper bound of ||f||_{p->p} is a valid lower bound.
struct DualWitness {
  Matrix f;
  double pairing = 0.0;
  double f_op_upper = 0.0;
};

struct FactNormOptions {
  Index r_max = 0;  // 0 means the default n^2
  int restarts = 8;
  int iterations = 120;
  std::uint64_t seed = 42;
};

struct FactNormResult {
  NormEstimate estimate;
  std::optional<Factorization> factorization;  // best upper witness
  std::optional<DualWitness> witness;          // best lower witness
  Index best_r = 0;
};

// Checks v = alpha w beta and the value bookkeeping; throws otherwise.
void validate_factorization(const Factorization& f, const Matrix& v,
                            const Exponent& e, double tol = 1e-8);

// Upper side of the predual norm: closed-form factorizations (identity
// sandwich, SVD split, rank-one, entrywise l1) refined by a seeded
// random-direction descent over (alpha, beta) with w recovered by least
// squares. Only exact reconstructions are accepted.
FactNormResult factnorm1_upper(const Matrix& v, const Exponent& e,
                               const FactNormOptions& opts = {});

// Lower side by duality: maximizes |<f, v>| over candidate functionals,
// each normalized by a certified upper bound of its operator p-norm.
FactNormResult factnorm1_lower(const Matrix& v, const Exponent& e,
                               const FactNormOptions& opts = {});

// Two-sided sandwich combining the above.
FactNormResult factnorm1(const Matrix& v, const Exponent& e,
                         const FactNormOptions& opts = {});

// Sum of singular values; at p = 2 the predual of the operator norm is
// the trace norm, giving an independent oracle.
double nuclear_oracle_p2(const Matrix& v);

// Upper bound for the polar-restricted variant: the search runs over
// invertible square factors a, b with value
// ||a||_{p'} * upper(a^{-1} v b^{-1}) * ||b||_p. Every square full-rank
// matrix is trivially polar decomposable, and any admissible wider
// factorization reduces to this shape with the same norms.
FactNormResult factnorm2_upper(const Matrix& v, const Exponent& e,
                               const FactNormOptions& opts = {});

// Block-diagonal combination for v1 (+) v2 with the factors rebalanced so
// the combined value is f1.value + f2.value.
Factorization direct_sum_combine(const Factorization& f1,
                                 const Factorization& f2, const Exponent& e);

// Same rebalancing for a sum v1 + v2 of equal-size matrices: stacks the
// factors instead of embedding them block-diagonally.
Factorization sum_combine(const Factorization& f1, const Factorization& f2,
                          const Exponent& e);

struct NormLowerInequalityReport {
  double op_lower = 0.0;
  double bound = 0.0;  // n^{2 delta} * factnorm1_upper
  bool ok = true;
};

// ||v|| <= n^{2|1/p-1/p'|} ||v||_{1,n}, tested in the sound direction
// with a certified operator-norm lower bound on the left.
NormLowerInequalityReport check_norm_lower_inequality(
    const Matrix& v, const Exponent& e, const FactNormOptions& opts = {});

}  // namespace popspace
