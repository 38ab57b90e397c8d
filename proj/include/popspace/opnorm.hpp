#pragma once

#include <limits>
#include <string>
#include <vector>

#include "popspace/norms.hpp"

namespace popspace {

enum class EstimateMethod {
  PowerIteration,
  Interpolation,
  ClosedForm,
  FactorizationSearch,
  DualPairing,
};

const char* to_string(EstimateMethod m);

// The honest answer to a nonconvex norm query: a lower bound certified by
// an evaluable witness and an upper bound from a provable inequality.
struct NormEstimate {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  Vector lower_witness;
  EstimateMethod method = EstimateMethod::PowerIteration;
  int restarts = 0;
  double tolerance = 0.0;
};

struct OpNormOptions {
  int restarts = 8;
  double tol = 1e-12;
  std::uint64_t seed = 42;
  int max_iterations = 500;
};

// Best value of ||Ax||_p over unit x found by duality-map power iteration
// from random starts plus the canonical basis and constant vectors.
// At p = 2 the SVD witness is also tried, so the estimate matches the
// largest singular value to solver accuracy.
NormEstimate opnorm_lower(const Matrix& a, const Exponent& e,
                          const OpNormOptions& opts = {});

// Certified upper bound: Riesz-Thorin endpoint interpolation
// ||A||_{p->p} <= ||A||_{1->1}^{1/p} ||A||_{inf->inf}^{1/p'};
// at p = 2 the bound is tightened with the largest singular value.
double opnorm_upper(const Matrix& a, const Exponent& e);

// Two-sided sandwich
NormEstimate opnorm_estimate(const Matrix& a, const Exponent& e,
                             const OpNormOptions& opts = {});

// Objective values of one power-iteration run started at x0
// (diagnostics; the sequence is nondecreasing)
std::vector<double> opnorm_power_trajectory(const Matrix& a, const Exponent& e,
                                            const Vector& x0, double tol,
                                            int max_iterations);

// Brute-force test oracle for matrices with at most 3 columns: maximizes
// ||Ax||_p over an angular grid on the unit p-sphere, zooming on the best
// cell. Independent of the power-iteration path.
double opnorm_oracle_small(const Matrix& a, const Exponent& e,
                           int grid_density = 16);

struct SweepViolation {
  long long case_index = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  std::uint64_t seed = 0;
};

struct SweepReport {
  long long trials = 0;
  double max_ratio = 0.0;  // max lhs/rhs over all cases
  std::vector<SweepViolation> violations;
  bool ok() const { return violations.empty(); }
};

// ||x||_p <= n^{|1/p-1/p'|} ||x||_{p'} on random vectors
SweepReport check_p_comparison(int n, const Exponent& e, long long trials,
                               std::uint64_t seed);

struct OpNormBoundReport {
  double lower_as_domain_map = 0.0;  // certified lower of ||A: l_p^c -> l_p^r||
  double bound_as_domain_map = 0.0;  // ||A||_{p'} n^delta
  double lower_transposed = 0.0;     // same for A^T : l_p^r -> l_p^c
  double bound_transposed = 0.0;     // ||A^T||_p n^delta
  bool ok = true;
};

// ||A||_{B(l_p^r, l_p^n)} <= ||A||_{p'} n^delta, and the transposed
// bound with the entrywise p-norm, both sides checked with certified
// lower bounds on the left
OpNormBoundReport check_opnorm_bounds(const Matrix& a, const Exponent& e,
                                      const OpNormOptions& opts = {});

}  // namespace popspace
