#include "popspace/factnorm.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace popspace {

namespace {

Factorization make_factorization(Matrix alpha, Matrix w, Matrix beta,
                                 const Exponent& e) {
  Factorization f;
  f.r = w.rows();
  f.w_upper = opnorm_upper(w, e);
  f.value = entrywise_norm(alpha, e.conjugate()) * f.w_upper *
            entrywise_norm(beta, e.p());
  f.alpha = std::move(alpha);
  f.w = std::move(w);
  f.beta = std::move(beta);
  return f;
}

Factorization identity_sandwich(const Matrix& v, const Exponent& e) {
  const Index n = v.rows();
  return make_factorization(Matrix::Identity(n, n), v, Matrix::Identity(n, n),
                            e);
}

Factorization svd_split(const Matrix& v, const Exponent& e) {
  Eigen::JacobiSVD<Matrix> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const Index k = sigma.size();
  Matrix alpha = svd.matrixU();
  Matrix beta = svd.matrixV().adjoint();
  for (Index i = 0; i < k; ++i) {
    alpha.col(i) *= std::pow(sigma(i), 1.0 / e.conjugate());
    beta.row(i) *= std::pow(sigma(i), 1.0 / e.p());
  }
  return make_factorization(std::move(alpha), Matrix::Identity(k, k),
                            std::move(beta), e);
}

std::optional<Factorization> rank_one_split(const Matrix& v,
                                            const Exponent& e) {
  Eigen::JacobiSVD<Matrix> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) == 0.0) return std::nullopt;
  if (sigma.size() > 1 && sigma(1) > 1e-12 * sigma(0)) return std::nullopt;
  Matrix alpha = svd.matrixU().col(0) * std::pow(sigma(0), 1.0 / e.conjugate());
  Matrix beta = svd.matrixV().col(0).adjoint() * std::pow(sigma(0), 1.0 / e.p());
  Matrix w = Matrix::Identity(1, 1);
  return make_factorization(std::move(alpha), std::move(w), std::move(beta), e);
}

// v_ij = |v_ij|^{1/p'} * (|v_ij|^{1/p} sign v_ij): one inner index per
// nonzero entry, w = identity. Value is the entrywise l1 norm.
std::optional<Factorization> entrywise_l1_split(const Matrix& v,
                                                const Exponent& e,
                                                Index r_max) {
  const Index n = v.rows();
  std::vector<std::pair<Index, Index>> nz;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (v(i, j) != Scalar(0.0)) nz.emplace_back(i, j);
    }
  }
  const Index r = static_cast<Index>(nz.size());
  if (r == 0 || r > r_max) return std::nullopt;
  Matrix alpha = Matrix::Zero(n, r);
  Matrix beta = Matrix::Zero(r, n);
  for (Index t = 0; t < r; ++t) {
    const auto [i, j] = nz[static_cast<std::size_t>(t)];
    const double m = std::abs(v(i, j));
    alpha(i, t) = std::pow(m, 1.0 / e.conjugate());
    beta(t, j) = std::pow(m, 1.0 / e.p()) * csign(v(i, j));
  }
  return make_factorization(std::move(alpha), Matrix::Identity(r, r),
                            std::move(beta), e);
}

double reconstruction_error(const Factorization& f, const Matrix& v) {
  const double scale = std::max(entrywise_norm(v, 2.0), 1e-300);
  return entrywise_norm(Matrix(f.alpha * f.w * f.beta - v), 2.0) / scale;
}

Matrix pseudo_inverse(const Matrix& a) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  return cod.pseudoInverse();
}

// rescale alpha and beta so that ||alpha||_{p'} = ||beta||_p; the product
// value is invariant, this just removes the flat direction
void balance(Matrix& alpha, Matrix& beta, const Exponent& e) {
  const double na = entrywise_norm(alpha, e.conjugate());
  const double nb = entrywise_norm(beta, e.p());
  if (na == 0.0 || nb == 0.0) return;
  const double t = std::sqrt(nb / na);
  alpha *= t;
  beta /= t;
}

std::optional<Factorization> least_squares_factorization(const Matrix& alpha,
                                                         const Matrix& beta,
                                                         const Matrix& v,
                                                         const Exponent& e) {
  const Matrix w = pseudo_inverse(alpha) * v * pseudo_inverse(beta);
  Factorization f = make_factorization(alpha, w, beta, e);
  if (reconstruction_error(f, v) > 1e-10) return std::nullopt;
  return f;
}

}  // namespace

void validate_factorization(const Factorization& f, const Matrix& v,
                            const Exponent& e, double tol) {
  if (reconstruction_error(f, v) > tol) {
    throw InputError("factorization does not reproduce the target");
  }
  const double book = entrywise_norm(f.alpha, e.conjugate()) * f.w_upper *
                      entrywise_norm(f.beta, e.p());
  if (std::abs(book - f.value) > 1e-9 * std::max(1.0, f.value)) {
    throw InputError("factorization value bookkeeping is inconsistent");
  }
  OpNormOptions probe;
  probe.restarts = 2;
  probe.seed = 7;
  if (f.w.size() > 0 &&
      f.w_upper < opnorm_lower(f.w, e, probe).lower * (1.0 - 1e-9)) {
    throw InputError("factorization w bound is not a valid upper bound");
  }
}

FactNormResult factnorm1_upper(const Matrix& v, const Exponent& e,
                               const FactNormOptions& opts) {
  require_finite(v, "v");
  const Index n = v.rows();
  if (v.cols() != n) throw InputError("factnorm1_upper: v must be square");
  const Index r_max = opts.r_max == 0 ? n * n : opts.r_max;
  if (r_max < n) throw InputError("factnorm1_upper: rMax must be >= n");

  FactNormResult result;
  result.estimate.method = EstimateMethod::FactorizationSearch;
  result.estimate.restarts = opts.restarts;

  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    const Index r = n;
    Factorization zero = make_factorization(
        Matrix::Identity(n, r), Matrix::Zero(r, r), Matrix::Identity(r, n), e);
    result.estimate.lower = 0.0;
    result.estimate.upper = 0.0;
    result.factorization = std::move(zero);
    result.best_r = r;
    return result;
  }
  const Matrix vn = v / scale;

  std::optional<Factorization> best;
  auto consider = [&](std::optional<Factorization> f) {
    if (!f) return;
    if (!best || f->value < best->value) best = std::move(f);
  };

  consider(identity_sandwich(vn, e));
  consider(svd_split(vn, e));
  consider(rank_one_split(vn, e));
  consider(entrywise_l1_split(vn, e, r_max));

  // seeded descent over (alpha, beta) with w recovered by least squares
  Rng rng = Rng(opts.seed).fork(0xfac1);
  Factorization current = *best;
  if (current.r < n) {
    // widen to r = n so the search has room (zero-padding keeps the value)
    Matrix alpha = Matrix::Zero(n, n);
    alpha.leftCols(current.alpha.cols()) = current.alpha;
    Matrix beta = Matrix::Zero(n, n);
    beta.topRows(current.beta.rows()) = current.beta;
    if (auto f = least_squares_factorization(alpha, beta, vn, e)) {
      current = *f;
    }
  }
  for (int restart = 0; restart < opts.restarts; ++restart) {
    Rng stream = rng.fork(static_cast<std::uint64_t>(restart));
    Matrix alpha;
    Matrix beta;
    if (restart == 0 && current.r <= r_max) {
      alpha = current.alpha;
      beta = current.beta;
    } else {
      alpha = random_matrix(stream, n, n);
      beta = random_matrix(stream, n, n);
    }
    balance(alpha, beta, e);
    auto fact = least_squares_factorization(alpha, beta, vn, e);
    if (!fact) continue;
    double step = 0.25;
    for (int it = 0; it < opts.iterations; ++it) {
      Matrix alpha_try =
          alpha + step * entrywise_norm(alpha, 2.0) / std::sqrt(2.0 * n * n) *
                      random_matrix(stream, alpha.rows(), alpha.cols());
      Matrix beta_try =
          beta + step * entrywise_norm(beta, 2.0) / std::sqrt(2.0 * n * n) *
                     random_matrix(stream, beta.rows(), beta.cols());
      balance(alpha_try, beta_try, e);
      auto trial = least_squares_factorization(alpha_try, beta_try, vn, e);
      if (trial && trial->value < fact->value) {
        fact = trial;
        alpha = std::move(alpha_try);
        beta = std::move(beta_try);
        step = std::min(step * 1.3, 0.5);
      } else {
        step *= 0.7;
        if (step < 1e-4) break;
      }
    }
    consider(fact);
  }

  // undo the input normalization by rescaling w
  best->w *= scale;
  best->w_upper *= scale;
  best->value *= scale;
  validate_factorization(*best, v, e, 1e-8);
  result.estimate.upper = best->value;
  result.best_r = best->r;
  result.factorization = std::move(best);
  return result;
}

FactNormResult factnorm1_lower(const Matrix& v, const Exponent& e,
                               const FactNormOptions& opts) {
  require_finite(v, "v");
  const Index n = v.rows();
  if (v.cols() != n) throw InputError("factnorm1_lower: v must be square");

  FactNormResult result;
  result.estimate.method = EstimateMethod::DualPairing;
  result.estimate.restarts = opts.restarts;
  result.estimate.lower = 0.0;

  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    result.witness = DualWitness{Matrix::Identity(n, n), 0.0, 1.0};
    return result;
  }
  const Matrix vn = v / scale;

  DualWitness best;
  double best_lower = -1.0;
  auto consider = [&](const Matrix& f, double exact_upper = 0.0) {
    const double pairing = std::abs((f.array() * vn.array()).sum());
    double upper = opnorm_upper(f, e);
    if (exact_upper > 0.0) upper = std::min(upper, exact_upper);
    if (upper <= 0.0) return;
    const double lower = pairing / upper;
    if (lower > best_lower) {
      best_lower = lower;
      best = DualWitness{f, pairing, upper};
    }
  };

  consider(Matrix::Identity(n, n));
  {
    Matrix f = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) f(i, i) = std::conj(csign(vn(i, i)));
    if (f.cwiseAbs().maxCoeff() > 0.0) consider(f);
  }
  Eigen::JacobiSVD<Matrix> svd(vn, Eigen::ComputeThinU | Eigen::ComputeThinV);
  consider(svd.matrixU().conjugate() * svd.matrixV().transpose());

  // rank-one Holder witnesses f = a b^T, ||f||_{p->p} = ||a||_p ||b||_{p'}
  // exactly; alternate the two Holder-dual updates to a fixed point
  auto rank_one_ascend = [&](Vector b) {
    const double nb = vec_p_norm(b, e.conjugate());
    if (nb == 0.0) return;
    b /= nb;
    Vector a = Vector::Zero(n);
    double pairing = 0.0;
    for (int it = 0; it < 50; ++it) {
      a = holder_dual(Vector(vn * b), e);
      b = holder_dual(Vector(vn.transpose() * a), e.dual());
      const double value = std::abs((a.transpose() * vn * b)(0, 0));
      if (value <= pairing * (1.0 + 1e-13)) break;
      pairing = value;
    }
    if (pairing == 0.0) return;
    const double exact = vec_p_norm(a, e.p()) * vec_p_norm(b, e.conjugate());
    consider(Matrix(a * b.transpose()), exact);
  };
  rank_one_ascend(svd.matrixV().col(0).conjugate());
  Rng rng = Rng(opts.seed).fork(0xfac2);
  for (int restart = 0; restart < opts.restarts; ++restart) {
    Rng stream = rng.fork(static_cast<std::uint64_t>(restart));
    rank_one_ascend(random_vector(stream, n));
  }

  // general seeded ascent on pairing / certified upper
  for (int restart = 0; restart < std::min(opts.restarts, 4); ++restart) {
    Rng stream = rng.fork(0x100 + static_cast<std::uint64_t>(restart));
    Matrix f = random_matrix(stream, n, n);
    double score = 0.0;
    {
      const double up = opnorm_upper(f, e);
      if (up == 0.0) continue;
      score = std::abs((f.array() * vn.array()).sum()) / up;
    }
    double step = 0.5;
    for (int it = 0; it < opts.iterations; ++it) {
      Matrix trial = f + step * random_matrix(stream, n, n);
      const double up = opnorm_upper(trial, e);
      if (up == 0.0) continue;
      const double s = std::abs((trial.array() * vn.array()).sum()) / up;
      if (s > score) {
        score = s;
        f = std::move(trial);
        step = std::min(step * 1.3, 1.0);
      } else {
        step *= 0.7;
        if (step < 1e-4) break;
      }
    }
    consider(f);
  }

  best.pairing *= scale;
  result.estimate.lower = best_lower * scale;
  result.witness = std::move(best);
  return result;
}

FactNormResult factnorm1(const Matrix& v, const Exponent& e,
                         const FactNormOptions& opts) {
  FactNormResult upper = factnorm1_upper(v, e, opts);
  FactNormResult lower = factnorm1_lower(v, e, opts);
  FactNormResult result;
  result.estimate = lower.estimate;
  result.estimate.upper = upper.estimate.upper;
  result.factorization = std::move(upper.factorization);
  result.witness = std::move(lower.witness);
  result.best_r = upper.best_r;
  return result;
}

double nuclear_oracle_p2(const Matrix& v) {
  require_finite(v, "v");
  Eigen::JacobiSVD<Matrix> svd(v);
  return svd.singularValues().sum();
}

FactNormResult factnorm2_upper(const Matrix& v, const Exponent& e,
                               const FactNormOptions& opts) {
  require_finite(v, "v");
  const Index n = v.rows();
  if (v.cols() != n) throw InputError("factnorm2_upper: v must be square");

  FactNormResult result;
  result.estimate.method = EstimateMethod::FactorizationSearch;
  result.estimate.restarts = opts.restarts;
  result.best_r = n;

  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    result.estimate.upper = 0.0;
    result.factorization = make_factorization(
        Matrix::Identity(n, n), Matrix::Zero(n, n), Matrix::Identity(n, n), e);
    return result;
  }
  const Matrix vn = v / scale;

  std::optional<Factorization> best;
  auto try_pair = [&](const Matrix& a, const Matrix& b) {
    // skip near-singular candidates
    Eigen::JacobiSVD<Matrix> sa(a);
    Eigen::JacobiSVD<Matrix> sb(b);
    const auto& va = sa.singularValues();
    const auto& vb = sb.singularValues();
    if (va(0) == 0.0 || va(va.size() - 1) < 1e-7 * va(0)) return;
    if (vb(0) == 0.0 || vb(vb.size() - 1) < 1e-7 * vb(0)) return;
    const Matrix bt = b.transpose();
    const Matrix w = a.partialPivLu().solve(
        Matrix(bt.partialPivLu().solve(vn.transpose()).transpose()));
    Factorization f = make_factorization(a, w, b, e);
    if (reconstruction_error(f, vn) > 1e-10) return;
    if (!best || f.value < best->value) best = std::move(f);
  };

  try_pair(Matrix::Identity(n, n), Matrix::Identity(n, n));

  // regularized SVD pairs: exact for nonsingular v, graceful otherwise
  {
    Eigen::JacobiSVD<Matrix> svd(vn, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    for (double eps : {0.0, 1e-3, 1e-2, 1e-1, 0.5}) {
      Eigen::VectorXd reg = sigma.cwiseMax(eps * sigma(0));
      if (reg(reg.size() - 1) <= 0.0) continue;
      Matrix a = svd.matrixU();
      Matrix b = svd.matrixV().adjoint();
      for (Index i = 0; i < n; ++i) {
        a.col(i) *= std::pow(reg(i), 1.0 / e.conjugate());
        b.row(i) *= std::pow(reg(i), 1.0 / e.p());
      }
      try_pair(a, b);
    }
  }

  Rng rng = Rng(opts.seed).fork(0xfac3);
  for (int restart = 0; restart < opts.restarts; ++restart) {
    Rng stream = rng.fork(static_cast<std::uint64_t>(restart));
    Matrix a = random_matrix(stream, n, n);
    Matrix b = random_matrix(stream, n, n);
    balance(a, b, e);
    try_pair(a, b);
    if (!best) continue;
    Matrix cur_a = best->alpha;
    Matrix cur_b = best->beta;
    double cur = best->value;
    double step = 0.2;
    for (int it = 0; it < opts.iterations; ++it) {
      Matrix a_try = cur_a + step * entrywise_norm(cur_a, 2.0) /
                                 std::sqrt(2.0 * n * n) *
                                 random_matrix(stream, n, n);
      Matrix b_try = cur_b + step * entrywise_norm(cur_b, 2.0) /
                                 std::sqrt(2.0 * n * n) *
                                 random_matrix(stream, n, n);
      balance(a_try, b_try, e);
      try_pair(a_try, b_try);
      if (best && best->value < cur) {
        cur = best->value;
        cur_a = best->alpha;
        cur_b = best->beta;
        step = std::min(step * 1.3, 0.5);
      } else {
        step *= 0.7;
        if (step < 1e-4) break;
      }
    }
  }

  best->w *= scale;
  best->w_upper *= scale;
  best->value *= scale;
  validate_factorization(*best, v, e, 1e-8);
  result.estimate.upper = best->value;
  result.factorization = std::move(best);
  return result;
}

namespace {

// rescale one component so its alpha/beta norms become value^{1/p'} and
// value^{1/p}; the Young pairing of the combined blocks then sums the
// values exactly (the triangle-inequality bookkeeping)
struct ScaledBlock {
  Matrix alpha, w, beta;
  double w_upper = 0.0;
};

ScaledBlock rescale_block(const Factorization& f, const Exponent& e) {
  ScaledBlock blk;
  if (f.value == 0.0) {
    blk.alpha = Matrix::Zero(f.alpha.rows(), f.alpha.cols());
    blk.w = Matrix::Zero(f.w.rows(), f.w.cols());
    blk.beta = Matrix::Zero(f.beta.rows(), f.beta.cols());
    blk.w_upper = 0.0;
    return blk;
  }
  const double na = entrywise_norm(f.alpha, e.conjugate());
  const double nb = entrywise_norm(f.beta, e.p());
  const double t = std::pow(f.value, 1.0 / e.conjugate()) / na;
  const double s = std::pow(f.value, 1.0 / e.p()) / nb;
  blk.alpha = f.alpha * t;
  blk.beta = f.beta * s;
  blk.w = f.w / (t * s);
  blk.w_upper = f.w_upper / (t * s);  // = 1 by construction
  return blk;
}

Factorization assemble(const ScaledBlock& b1, const ScaledBlock& b2,
                       const Exponent& e, bool direct_sum) {
  const Index n1 = b1.alpha.rows();
  const Index n2 = b2.alpha.rows();
  const Index r1 = b1.w.rows();
  const Index r2 = b2.w.rows();
  Factorization f;
  f.r = r1 + r2;
  if (direct_sum) {
    f.alpha = Matrix::Zero(n1 + n2, r1 + r2);
    f.alpha.topLeftCorner(n1, r1) = b1.alpha;
    f.alpha.bottomRightCorner(n2, r2) = b2.alpha;
    f.beta = Matrix::Zero(r1 + r2, n1 + n2);
    f.beta.topLeftCorner(r1, n1) = b1.beta;
    f.beta.bottomRightCorner(r2, n2) = b2.beta;
  } else {
    f.alpha = Matrix::Zero(n1, r1 + r2);
    f.alpha.leftCols(r1) = b1.alpha;
    f.alpha.rightCols(r2) = b2.alpha;
    f.beta = Matrix::Zero(r1 + r2, n1);
    f.beta.topRows(r1) = b1.beta;
    f.beta.bottomRows(r2) = b2.beta;
  }
  f.w = Matrix::Zero(r1 + r2, r1 + r2);
  f.w.topLeftCorner(r1, r1) = b1.w;
  f.w.bottomRightCorner(r2, r2) = b2.w;
  // block-diagonal operators on l_p sums have norm max of the blocks
  f.w_upper = std::max(b1.w_upper, b2.w_upper);
  f.value = entrywise_norm(f.alpha, e.conjugate()) * f.w_upper *
            entrywise_norm(f.beta, e.p());
  return f;
}

}  // namespace

Factorization direct_sum_combine(const Factorization& f1,
                                 const Factorization& f2, const Exponent& e) {
  return assemble(rescale_block(f1, e), rescale_block(f2, e), e, true);
}

Factorization sum_combine(const Factorization& f1, const Factorization& f2,
                          const Exponent& e) {
  if (f1.alpha.rows() != f2.alpha.rows()) {
    throw InputError("sum_combine: sizes differ");
  }
  return assemble(rescale_block(f1, e), rescale_block(f2, e), e, false);
}

NormLowerInequalityReport check_norm_lower_inequality(
    const Matrix& v, const Exponent& e, const FactNormOptions& opts) {
  NormLowerInequalityReport report;
  OpNormOptions oopts;
  oopts.restarts = opts.restarts;
  oopts.seed = opts.seed;
  report.op_lower = opnorm_lower(v, e, oopts).lower;
  const double upper = factnorm1_upper(v, e, opts).estimate.upper;
  report.bound =
      std::pow(static_cast<double>(v.rows()), 2.0 * e.delta()) * upper;
  report.ok = report.op_lower <= report.bound * (1.0 + 1e-9) + 1e-300;
  return report;
}

}  // namespace popspace
