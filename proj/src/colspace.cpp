#include "popspace/colspace.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace popspace {

SubspaceEmbedding::SubspaceEmbedding(Matrix basis_in, const Exponent& e)
    : ambient_dim(basis_in.rows()),
      dim(basis_in.cols()),
      basis(std::move(basis_in)),
      p(e.p()) {
  require_finite(basis, "basis");
  if (dim < 1 || ambient_dim < dim) {
    throw InputError("subspace basis must be m x k with 1 <= k <= m");
  }
  Eigen::JacobiSVD<Matrix> svd(basis);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0 || sv(sv.size() - 1) <= 1e-10 * sv(0)) {
    throw InputError("subspace basis is rank deficient");
  }
}

double SubspaceEmbedding::span_residual(const Vector& x) const {
  const double nx = x.norm();
  if (nx == 0.0) return 0.0;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(basis);
  const Vector coeffs = cod.solve(x);
  return (basis * coeffs - x).norm() / nx;
}

Matrix ColumnMatrix::stacked() const {
  Matrix s = Matrix::Zero(n * entry_dim, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      s.block(i * entry_dim, j, entry_dim, 1) =
          entries[static_cast<std::size_t>(i * n + j)];
    }
  }
  return s;
}

ColumnMatrix ColumnMatrix::from_stacked(const Matrix& s, Index entry_dim) {
  if (entry_dim < 1 || s.rows() % entry_dim != 0 ||
      s.rows() / entry_dim != s.cols()) {
    throw InputError("stacked column matrix must be (n*m) x n");
  }
  ColumnMatrix x;
  x.n = s.cols();
  x.entry_dim = entry_dim;
  x.entries.resize(static_cast<std::size_t>(x.n * x.n));
  for (Index i = 0; i < x.n; ++i) {
    for (Index j = 0; j < x.n; ++j) {
      x.entries[static_cast<std::size_t>(i * x.n + j)] =
          s.block(i * entry_dim, j, entry_dim, 1);
    }
  }
  return x;
}

NormEstimate col_matrix_norm(const ColumnMatrix& x, const Exponent& e,
                             int restarts, std::uint64_t seed) {
  OpNormOptions opts;
  opts.restarts = restarts;
  opts.seed = seed;
  return opnorm_lower(x.stacked(), e, opts);
}

double col_matrix_norm_upper(const ColumnMatrix& x, const Exponent& e) {
  return opnorm_upper(x.stacked(), e);
}

EmbeddingConsistencyReport check_column_embedding_isometry(
    const SubspaceEmbedding& emb, Index n, int trials, std::uint64_t seed) {
  EmbeddingConsistencyReport report;
  report.trials = trials;
  const Exponent e = emb.exponent();
  Rng rng = Rng(seed).fork(0xc01);
  for (int t = 0; t < trials; ++t) {
    Rng stream = rng.fork(static_cast<std::uint64_t>(t));
    // the same element, represented through coefficients and through its
    // ambient entries
    Matrix coeff_stack = Matrix::Zero(n * emb.dim, n);
    ColumnMatrix ambient;
    ambient.n = n;
    ambient.entry_dim = emb.ambient_dim;
    ambient.entries.resize(static_cast<std::size_t>(n * n));
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        const Vector g = random_vector(stream, emb.dim);
        coeff_stack.block(i * emb.dim, j, emb.dim, 1) = g;
        ambient.entries[static_cast<std::size_t>(i * n + j)] = emb.lift(g);
      }
    }
    // lift the coefficient representation inside the stacked evaluator
    Matrix lifted = Matrix::Zero(n * emb.ambient_dim, n);
    for (Index i = 0; i < n; ++i) {
      lifted.block(i * emb.ambient_dim, 0, emb.ambient_dim, n) =
          emb.basis * coeff_stack.block(i * emb.dim, 0, emb.dim, n);
    }
    OpNormOptions opts;
    opts.seed = stream.seed();
    const double via_coeffs = opnorm_lower(lifted, e, opts).lower;
    const double via_ambient =
        col_matrix_norm(ambient, e, opts.restarts, opts.seed).lower;
    const double scale = std::max({via_coeffs, via_ambient, 1e-300});
    report.max_deviation = std::max(
        report.max_deviation, std::abs(via_coeffs - via_ambient) / scale);
  }
  report.ok = report.max_deviation <= 1e-9;
  return report;
}

std::pair<Scalar, Vector> phi_apply(const Vector& xi, Scalar lambda,
                                    const Vector& e_vec) {
  (void)e_vec;  // T_xi annihilates the E slot
  return {Scalar(0.0), Vector(lambda * xi)};
}

Matrix phi_operator(const Vector& xi) {
  const Index m = xi.size();
  Matrix t = Matrix::Zero(m + 1, m + 1);
  t.block(1, 0, m, 1) = xi;
  return t;
}

PsiResult psi_apply(const Matrix& t, const SubspaceEmbedding& emb,
                    double tol) {
  if (t.rows() != emb.ambient_dim + 1 || t.cols() != emb.ambient_dim + 1) {
    throw InputError("psi_apply: operator must act on C (+) l_p^m");
  }
  PsiResult result;
  result.value = t.block(1, 0, emb.ambient_dim, 1);
  result.residual = emb.span_residual(result.value);
  result.in_subspace = result.residual <= tol;
  return result;
}

namespace {

// block matrix of phi applied entrywise: n x n blocks of T_{xi_ij}
Matrix phi_amplified(const ColumnMatrix& x) {
  const Index n = x.n;
  const Index d = x.entry_dim + 1;
  Matrix big = Matrix::Zero(n * d, n * d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      big.block(i * d, j * d, d, d) =
          phi_operator(x.entries[static_cast<std::size_t>(i * n + j)]);
    }
  }
  return big;
}

}  // namespace

PhiPsiReport check_phi_psi_contractive(const SubspaceEmbedding& emb, int n_max,
                                       int trials, std::uint64_t seed,
                                       double tol) {
  if (n_max < 1) throw InputError("check_phi_psi_contractive: nMax must be >= 1");
  PhiPsiReport report;
  report.n_max = n_max;
  report.trials = trials;
  const Exponent e = emb.exponent();
  const Index m = emb.ambient_dim;
  Rng rng = Rng(seed).fork(0xc02);

  // exact round trip on random elements of E
  for (int t = 0; t < trials; ++t) {
    Rng stream = rng.fork(0x700 + static_cast<std::uint64_t>(t));
    const Vector xi = emb.lift(random_vector(stream, emb.dim));
    const Matrix t_xi = phi_operator(xi);
    const Vector back = t_xi.block(1, 0, m, 1);
    report.roundtrip_deviation = std::max(
        report.roundtrip_deviation, (back - xi).cwiseAbs().maxCoeff());
  }

  for (int n = 1; n <= n_max; ++n) {
    for (int t = 0; t < trials; ++t) {
      Rng stream =
          rng.fork(static_cast<std::uint64_t>(n) * 10007 +
                   static_cast<std::uint64_t>(t));
      OpNormOptions opts;
      opts.restarts = 4;
      opts.seed = stream.seed();

      // phi_n on a sampled matrix over E^c
      ColumnMatrix x;
      x.n = n;
      x.entry_dim = m;
      x.entries.resize(static_cast<std::size_t>(n) * n);
      for (auto& entry : x.entries) {
        entry = emb.lift(random_vector(stream, emb.dim));
      }
      const double upper_x = col_matrix_norm_upper(x, e);
      const double lower_phi = opnorm_lower(phi_amplified(x), e, opts).lower;
      report.max_phi_ratio =
          std::max(report.max_phi_ratio,
                   upper_x > 0.0 ? lower_phi / upper_x : 0.0);
      if (lower_phi > upper_x * (1.0 + tol)) {
        report.violations.push_back({n, t, lower_phi, upper_x, "phi"});
      }

      // psi_n on a sampled operator matrix over B(C (+) l_p^m)
      const Matrix big = random_matrix(stream, n * (m + 1), n * (m + 1));
      const double upper_t = opnorm_upper(big, e);
      ColumnMatrix psi_x;
      psi_x.n = n;
      psi_x.entry_dim = m;
      psi_x.entries.resize(static_cast<std::size_t>(n) * n);
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
          const Matrix block = big.block(i * (m + 1), j * (m + 1), m + 1, m + 1);
          psi_x.entries[static_cast<std::size_t>(i * n + j)] =
              block.block(1, 0, m, 1);
        }
      }
      const double lower_psi =
          col_matrix_norm(psi_x, e, opts.restarts, opts.seed).lower;
      report.max_psi_ratio =
          std::max(report.max_psi_ratio,
                   upper_t > 0.0 ? lower_psi / upper_t : 0.0);
      if (lower_psi > upper_t * (1.0 + tol)) {
        report.violations.push_back({n, t, lower_psi, upper_t, "psi"});
      }
    }
  }
  return report;
}

ProjectionSearchResult projection_constant(const SubspaceEmbedding& emb,
                                           int restarts, int iterations,
                                           std::uint64_t seed) {
  const Exponent e = emb.exponent();
  const Index m = emb.ambient_dim;
  const Index k = emb.dim;
  ProjectionSearchResult result;
  result.restarts = restarts;
  result.iterations = iterations;
  if (k == m) {
    result.best_upper = 1.0;
    result.projection = Matrix::Identity(m, m);
    return result;
  }

  const Matrix pinv = [&] {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(emb.basis);
    return Matrix(cod.pseudoInverse());
  }();
  // rows spanning the left null space of the basis
  Eigen::JacobiSVD<Matrix> svd(emb.basis, Eigen::ComputeFullU);
  const Matrix null_rows = svd.matrixU().rightCols(m - k).adjoint();

  auto evaluate = [&](const Matrix& z) {
    const Matrix g = pinv + z * null_rows;
    return std::pair<double, Matrix>(opnorm_upper(emb.basis * g, e),
                                     emb.basis * g);
  };

  auto [best, best_p] = evaluate(Matrix::Zero(k, m - k));
  result.best_upper = best;
  result.projection = best_p;

  // deterministic compass search on the real coordinates of Z, restarted
  // from the pseudo-inverse point and from seeded random points
  auto compass = [&](Matrix z, double step) {
    auto [cur, cur_p] = evaluate(z);
    for (int it = 0; it < iterations; ++it) {
      double best_val = cur;
      Matrix best_z = z;
      Matrix best_proj = cur_p;
      for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < m - k; ++j) {
          for (const Scalar dir : {Scalar(1, 0), Scalar(-1, 0), Scalar(0, 1),
                                   Scalar(0, -1)}) {
            Matrix z_try = z;
            z_try(i, j) += step * dir;
            auto [val, p_try] = evaluate(z_try);
            if (val < best_val) {
              best_val = val;
              best_z = std::move(z_try);
              best_proj = std::move(p_try);
            }
          }
        }
      }
      if (best_val < cur) {
        cur = best_val;
        z = best_z;
        cur_p = best_proj;
        step *= 1.6;
      } else {
        step *= 0.5;
        if (step < 1e-10) break;
      }
    }
    if (cur < result.best_upper) {
      result.best_upper = cur;
      result.projection = cur_p;
    }
  };

  compass(Matrix::Zero(k, m - k), 0.25);
  Rng rng = Rng(seed).fork(0xc03);
  for (int restart = 1; restart < restarts; ++restart) {
    Rng stream = rng.fork(static_cast<std::uint64_t>(restart));
    compass(Matrix(0.6 * random_matrix(stream, k, m - k)), 0.25);
  }
  return result;
}

CounterexampleReport counterexample_report(const SubspaceEmbedding& emb,
                                           const CounterexampleOptions& opts) {
  CounterexampleReport report;
  report.phi_psi = check_phi_psi_contractive(emb, opts.n_max, opts.trials,
                                             opts.seed, opts.tol);
  report.projection = projection_constant(emb, opts.restarts, opts.iterations,
                                          opts.seed);
  report.one_complemented = report.projection.best_upper <= 1.0 + opts.tol;
  report.margin = std::max(0.0, report.projection.best_upper - 1.0);
  if (report.one_complemented) {
    // an upper bound of 1 certifies 1-complementation outright
    report.flags.push_back("1-complemented, no obstruction");
  } else {
    report.flags.push_back(
        "no certified norm-1 projection found: best upper bound exceeds 1 "
        "by " +
        std::to_string(report.margin));
  }
  if (!report.phi_psi.ok()) {
    report.flags.push_back("phi/psi contraction check failed");
  }
  return report;
}

}  // namespace popspace
