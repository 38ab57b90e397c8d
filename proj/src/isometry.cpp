#include "popspace/isometry.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace popspace {

std::vector<Index> support(const Vector& x, double tol) {
  std::vector<Index> idx;
  if (x.size() == 0) return idx;
  const double m = x.cwiseAbs().maxCoeff();
  if (m == 0.0) return idx;
  for (Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > tol * m) idx.push_back(i);
  }
  return idx;
}

IsometryCertificate is_lp_isometry(const Matrix& tau, const Exponent& e,
                                   double tol) {
  require_finite(tau, "tau");
  if (tol <= 0.0) throw InputError("is_lp_isometry: tol must be positive");
  const Index r = tau.rows();
  const Index n = tau.cols();
  if (r < n) {
    throw InputError("is_lp_isometry: no isometry exists with rows < cols");
  }
  IsometryCertificate cert;
  if (e.p() == 2.0) {
    const Matrix gram = tau.adjoint() * tau - Matrix::Identity(n, n);
    cert.gram_residual = gram.cwiseAbs().maxCoeff();
    cert.isometry = cert.gram_residual <= tol;
    if (!cert.isometry) cert.reason = "columns are not orthonormal";
    for (Index j = 0; j < n; ++j) {
      cert.column_supports.push_back(support(tau.col(j), tol));
      cert.column_norms.push_back(tau.col(j).norm());
    }
    return cert;
  }
  std::vector<char> used(static_cast<std::size_t>(r), 0);
  bool disjoint = true;
  bool unit = true;
  for (Index j = 0; j < n; ++j) {
    auto supp = support(tau.col(j), tol);
    for (Index i : supp) {
      if (used[static_cast<std::size_t>(i)]) disjoint = false;
      used[static_cast<std::size_t>(i)] = 1;
    }
    const double nrm = vec_p_norm(tau.col(j), e.p());
    if (std::abs(nrm - 1.0) > tol) unit = false;
    cert.column_supports.push_back(std::move(supp));
    cert.column_norms.push_back(nrm);
  }
  cert.isometry = disjoint && unit;
  if (!disjoint) {
    cert.reason = "column supports overlap";
  } else if (!unit) {
    cert.reason = "some column p-norm differs from 1";
  }
  return cert;
}

RowGrouping group_rows(const Matrix& beta, double tol) {
  require_finite(beta, "beta");
  const Index r = beta.rows();
  RowGrouping g;
  g.class_of.assign(static_cast<std::size_t>(r), -1);
  g.scale_of.assign(static_cast<std::size_t>(r), Scalar(0.0));
  double max_row_norm = 0.0;
  for (Index i = 0; i < r; ++i) {
    max_row_norm = std::max(max_row_norm, beta.row(i).norm());
  }
  for (Index i = 0; i < r; ++i) {
    const Vector row = beta.row(i).transpose();
    const double nrm = row.norm();
    if (nrm <= tol * max_row_norm || nrm == 0.0) {
      g.zero_rows.push_back(i);
      continue;
    }
    int best_class = -1;
    Scalar best_scale(0.0);
    double best_residual = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.pivots.size(); ++k) {
      const Vector pivot = beta.row(g.pivots[k]).transpose();
      const Scalar c = pivot.dot(row) / pivot.squaredNorm();
      const double residual = (row - c * pivot).norm() / nrm;
      if (residual < best_residual) {
        best_residual = residual;
        best_class = static_cast<int>(k);
        best_scale = c;
      }
    }
    if (best_class >= 0 && best_residual <= tol) {
      g.class_of[static_cast<std::size_t>(i)] = best_class;
      g.scale_of[static_cast<std::size_t>(i)] = best_scale;
    } else {
      g.class_of[static_cast<std::size_t>(i)] = static_cast<int>(g.pivots.size());
      g.scale_of[static_cast<std::size_t>(i)] = Scalar(1.0);
      g.pivots.push_back(i);
    }
  }
  return g;
}

DecomposabilityReport is_polar_decomposable(const Matrix& beta,
                                            const Exponent& e, double tol) {
  (void)e;
  require_finite(beta, "beta");
  const Index r = beta.rows();
  const Index n = beta.cols();
  DecomposabilityReport report;
  if (r < n) {
    report.reason = "rows < cols: the definition requires r >= n";
    return report;
  }
  RowGrouping g = group_rows(beta, tol);
  report.class_count = static_cast<int>(g.pivots.size());
  report.pivots = g.pivots;
  report.zero_rows = g.zero_rows;
  report.decomposable = report.class_count <= static_cast<int>(n);
  if (!report.decomposable) {
    report.reason = "more projective row classes than columns";
  }
  Eigen::JacobiSVD<Matrix> svd(beta);
  const auto& sv = svd.singularValues();
  if (sv.size() > 0 && sv(0) > 0.0) {
    for (Index k = 0; k < sv.size(); ++k) {
      if (sv(k) > tol * sv(0)) ++report.rank;
    }
  }
  report.full_rank = report.decomposable && report.rank == n;
  return report;
}

PolarDecomposition polar_decompose(const Matrix& beta, const Exponent& e,
                                   double tol) {
  const Index r = beta.rows();
  const Index n = beta.cols();
  DecomposabilityReport check = is_polar_decomposable(beta, e, tol);
  if (!check.decomposable) {
    throw InputError("polar_decompose: not decomposable (" + check.reason +
                     "; classes=" + std::to_string(check.class_count) + ")");
  }
  RowGrouping g = group_rows(beta, tol);
  const double p = e.p();

  // one column per class to start; split classes (or park unit mass on a
  // zero row) until there are exactly n columns, keeping supports disjoint
  struct Column {
    std::vector<Index> rows;  // rows carrying mass, empty for zero-row slots
    Index pivot = -1;         // -1 marks a zero-row slot
    Index host = -1;          // the zero row hosting a slot
  };
  std::vector<Column> columns;
  for (std::size_t k = 0; k < g.pivots.size(); ++k) {
    Column col;
    col.pivot = g.pivots[k];
    for (Index i = 0; i < r; ++i) {
      if (g.class_of[static_cast<std::size_t>(i)] == static_cast<int>(k)) {
        col.rows.push_back(i);
      }
    }
    columns.push_back(std::move(col));
  }
  std::size_t next_zero = 0;
  while (columns.size() < static_cast<std::size_t>(n)) {
    std::size_t widest = 0;
    for (std::size_t k = 1; k < columns.size(); ++k) {
      if (columns[k].rows.size() > columns[widest].rows.size()) widest = k;
    }
    if (!columns.empty() && columns[widest].rows.size() >= 2) {
      Column split;
      split.pivot = columns[widest].pivot;
      split.rows.push_back(columns[widest].rows.back());
      columns[widest].rows.pop_back();
      columns.push_back(std::move(split));
    } else if (next_zero < g.zero_rows.size()) {
      Column slot;
      slot.host = g.zero_rows[next_zero++];
      columns.push_back(std::move(slot));
    } else {
      throw InputError("polar_decompose: fewer rows than columns available");
    }
  }

  PolarDecomposition pd;
  pd.grouping = g;
  pd.tau = Matrix::Zero(r, n);
  pd.beta0 = Matrix::Zero(n, n);
  pd.lambda.assign(static_cast<std::size_t>(n), 1.0);
  for (Index k = 0; k < n; ++k) {
    const Column& col = columns[static_cast<std::size_t>(k)];
    if (col.pivot < 0) {
      pd.tau(col.host, k) = Scalar(1.0);
      continue;  // beta0 row stays zero, lambda stays 1
    }
    double mass = 0.0;
    for (Index i : col.rows) {
      mass += std::pow(std::abs(g.scale_of[static_cast<std::size_t>(i)]), p);
    }
    const double lambda = std::pow(mass, -1.0 / p);
    pd.lambda[static_cast<std::size_t>(k)] = lambda;
    for (Index i : col.rows) {
      pd.tau(i, k) = g.scale_of[static_cast<std::size_t>(i)] * lambda;
    }
    pd.beta0.row(k) = beta.row(col.pivot) / lambda;
  }

  const double scale = std::max(entrywise_norm(beta, 2.0), 1e-300);
  const double recon_err =
      entrywise_norm(Matrix(pd.tau * pd.beta0 - beta), 2.0) / scale;
  const double norm_gap =
      std::abs(entrywise_norm(pd.beta0, p) - entrywise_norm(beta, p)) /
      std::max(entrywise_norm(beta, p), 1e-300);
  const double check_tol = std::max(tol, 1e-10);
  if (recon_err > check_tol || norm_gap > check_tol ||
      !is_lp_isometry(pd.tau, e, std::max(tol, 1e-12)).isometry) {
    throw InputError("polar_decompose: construction failed verification");
  }
  return pd;
}

}  // namespace popspace
