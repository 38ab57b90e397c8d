#include "popspace/opnorm.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace popspace {

const char* to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::PowerIteration: return "power-iteration";
    case EstimateMethod::Interpolation: return "interpolation";
    case EstimateMethod::ClosedForm: return "closed-form";
    case EstimateMethod::FactorizationSearch: return "factorization-search";
    case EstimateMethod::DualPairing: return "dual-pairing";
  }
  return "unknown";
}

namespace {

Vector normalized_p(const Vector& x, double p) {
  const double n = vec_p_norm(x, p);
  return n == 0.0 ? Vector(x) : Vector(x / n);
}

// One ascent run of the duality-map power iteration. Starting from x
// (normalized to the unit p-sphere), repeats x <- J_{p'}(A* J_p(A x))
// until the objective ||Ax||_p stalls. Each step maximizes the Holder
// pairing against the current gradient, so the objective never decreases.
double power_iterate(const Matrix& a, const Exponent& e, Vector& x,
                     double tol, int max_iterations,
                     std::vector<double>* trajectory = nullptr) {
  const double p = e.p();
  const double pc = e.conjugate();
  x = normalized_p(x, p);
  double value = vec_p_norm(a * x, p);
  if (trajectory) trajectory->push_back(value);
  for (int it = 0; it < max_iterations; ++it) {
    const Vector y = a * x;
    if (vec_p_norm(y, p) == 0.0) break;
    Vector g = a.adjoint() * duality_map(y, p);
    const double gmax = g.cwiseAbs().maxCoeff();
    if (gmax == 0.0) break;
    g /= gmax;  // J is homogeneous; rescale to dodge overflow in powers
    const Vector next = normalized_p(duality_map(g, pc), p);
    const double next_value = vec_p_norm(a * next, p);
    if (next_value < value) break;  // fp noise at convergence; keep old x
    if (trajectory) trajectory->push_back(next_value);
    const double gain = next_value - value;
    x = next;
    value = next_value;
    if (gain <= tol * std::max(value, 1.0)) break;
  }
  return value;
}

double interpolation_bound(const Matrix& a, const Exponent& e) {
  if (a.size() == 0) return 0.0;
  const double col = a.cwiseAbs().colwise().sum().maxCoeff();  // ||A||_{1->1}
  const double row = a.cwiseAbs().rowwise().sum().maxCoeff();  // ||A||_{inf->inf}
  if (col == 0.0 || row == 0.0) return 0.0;
  return std::pow(col, 1.0 / e.p()) * std::pow(row, 1.0 / e.conjugate());
}

}  // namespace

std::vector<double> opnorm_power_trajectory(const Matrix& a, const Exponent& e,
                                            const Vector& x0, double tol,
                                            int max_iterations) {
  std::vector<double> trajectory;
  Vector x = x0;
  power_iterate(a, e, x, tol, max_iterations, &trajectory);
  return trajectory;
}

NormEstimate opnorm_lower(const Matrix& a, const Exponent& e,
                          const OpNormOptions& opts) {
  require_finite(a);
  if (opts.restarts < 1) throw InputError("opnorm_lower: restarts must be >= 1");
  const Index n = a.cols();
  NormEstimate est;
  est.restarts = opts.restarts;
  est.tolerance = opts.tol;
  est.lower = 0.0;
  est.lower_witness = Vector::Unit(n, 0);
  est.method = EstimateMethod::PowerIteration;

  auto consider = [&](Vector x, EstimateMethod method) {
    const double value = power_iterate(a, e, x, opts.tol, opts.max_iterations);
    if (value > est.lower) {
      est.lower = value;
      est.lower_witness = x;
      est.method = method;
    }
  };

  for (Index j = 0; j < n; ++j) {
    consider(Vector::Unit(n, j), EstimateMethod::PowerIteration);
  }
  consider(Vector::Ones(n), EstimateMethod::PowerIteration);
  Rng rng = Rng(opts.seed).fork(0x0b5e55);
  for (int r = 0; r < opts.restarts; ++r) {
    Rng stream = rng.fork(static_cast<std::uint64_t>(r));
    consider(random_vector(stream, n), EstimateMethod::PowerIteration);
  }
  if (e.p() == 2.0 && a.size() > 0) {
    // the top right singular vector is an evaluable witness; polishing it
    // through the same iteration keeps the estimate a true lower bound
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinV);
    consider(svd.matrixV().col(0), EstimateMethod::ClosedForm);
  }
  return est;
}

double opnorm_upper(const Matrix& a, const Exponent& e) {
  require_finite(a);
  double upper = interpolation_bound(a, e);
  if (e.p() == 2.0 && a.size() > 0) {
    Eigen::JacobiSVD<Matrix> svd(a);
    const double sigma = svd.singularValues().size() > 0
                             ? svd.singularValues()(0)
                             : 0.0;
    upper = std::min(upper, sigma * (1.0 + 1e-12));
  }
  return upper;
}

NormEstimate opnorm_estimate(const Matrix& a, const Exponent& e,
                             const OpNormOptions& opts) {
  NormEstimate est = opnorm_lower(a, e, opts);
  est.upper = opnorm_upper(a, e);
  return est;
}

double opnorm_oracle_small(const Matrix& a, const Exponent& e,
                           int grid_density) {
  require_finite(a);
  const Index c = a.cols();
  if (c > 3) throw InputError("opnorm_oracle_small: supports at most 3 columns");
  if (grid_density < 4) grid_density = 4;
  const double p = e.p();
  if (c == 1) return vec_p_norm(a.col(0), p);

  const double half_pi = 1.5707963267948966;
  const double two_pi = 6.283185307179586;
  // coordinates on the unit p-sphere: magnitude angles t_k in [0, pi/2]
  // (cos^2 + sin^2 mass split, raised to 1/p) and one free phase per
  // coordinate after the first (a global phase is quotiented out)
  const int dims = (c == 2) ? 2 : 4;
  auto eval = [&](const double* q) {
    Vector x(c);
    if (c == 2) {
      const double m1 = std::pow(std::cos(q[0]) * std::cos(q[0]), 1.0 / p);
      const double m2 = std::pow(std::sin(q[0]) * std::sin(q[0]), 1.0 / p);
      x[0] = m1;
      x[1] = m2 * std::polar(1.0, q[1]);
    } else {
      const double c1 = std::cos(q[0]) * std::cos(q[0]);
      const double s1 = 1.0 - c1;
      const double c2 = std::cos(q[1]) * std::cos(q[1]);
      const double s2 = 1.0 - c2;
      x[0] = std::pow(c1, 1.0 / p);
      x[1] = std::pow(s1 * c2, 1.0 / p) * std::polar(1.0, q[2]);
      x[2] = std::pow(s1 * s2, 1.0 / p) * std::polar(1.0, q[3]);
    }
    return vec_p_norm(a * x, p);
  };

  double full_lo[4] = {0.0, 0.0, 0.0, 0.0};
  double full_hi[4] = {half_pi, two_pi, 0.0, 0.0};
  if (c == 3) {
    full_hi[1] = half_pi;
    full_hi[2] = two_pi;
    full_hi[3] = two_pi;
  }

  struct Point {
    double value;
    double q[4];
  };
  auto scan = [&](const double* lo, const double* hi, int density,
                  std::vector<Point>* keep, int keep_count) {
    Point best{-1.0, {0, 0, 0, 0}};
    std::vector<int> idx(static_cast<std::size_t>(dims), 0);
    while (true) {
      Point pt{0.0, {0, 0, 0, 0}};
      for (int k = 0; k < dims; ++k) {
        pt.q[k] = lo[k] + (hi[k] - lo[k]) * idx[static_cast<std::size_t>(k)] /
                              (density - 1);
      }
      pt.value = eval(pt.q);
      if (pt.value > best.value) best = pt;
      if (keep) {
        keep->push_back(pt);
        std::push_heap(keep->begin(), keep->end(),
                       [](const Point& a, const Point& b) {
                         return a.value > b.value;
                       });
        if (static_cast<int>(keep->size()) > keep_count) {
          std::pop_heap(keep->begin(), keep->end(),
                        [](const Point& a, const Point& b) {
                          return a.value > b.value;
                        });
          keep->pop_back();
        }
      }
      int k = 0;
      while (k < dims && ++idx[static_cast<std::size_t>(k)] == density) {
        idx[static_cast<std::size_t>(k)] = 0;
        ++k;
      }
      if (k == dims) break;
    }
    return best;
  };

  // coarse scan keeping several cells, then a zooming scan around each;
  // multiple seeds guard against zooming into the wrong basin
  std::vector<Point> seeds;
  Point best = scan(full_lo, full_hi, grid_density, &seeds, 8);
  for (const Point& seed : seeds) {
    double span[4];
    double lo[4];
    double hi[4];
    for (int k = 0; k < dims; ++k) {
      span[k] = (full_hi[k] - full_lo[k]) / (grid_density - 1) * 1.5;
    }
    Point center = seed;
    for (int round = 0; round < 9; ++round) {
      for (int k = 0; k < dims; ++k) {
        lo[k] = center.q[k] - span[k];
        hi[k] = center.q[k] + span[k];
        span[k] *= 0.3;
      }
      lo[0] = std::max(lo[0], 0.0);
      hi[0] = std::min(hi[0], half_pi);
      if (c == 3) {
        lo[1] = std::max(lo[1], 0.0);
        hi[1] = std::min(hi[1], half_pi);
      }
      const Point local = scan(lo, hi, 7, nullptr, 0);
      if (local.value > center.value) center = local;
    }
    if (center.value > best.value) best = center;
  }
  return best.value;
}

SweepReport check_p_comparison(int n, const Exponent& e, long long trials,
                               std::uint64_t seed) {
  if (trials < 1) throw InputError("check_p_comparison: trials must be >= 1");
  SweepReport report;
  report.trials = trials;
  Rng rng = Rng(seed).fork(0xc0aa94);
  const double scale = std::pow(static_cast<double>(n), e.delta());
  for (long long t = 0; t < trials; ++t) {
    Rng stream = rng.fork(static_cast<std::uint64_t>(t));
    const Ensemble ens = static_cast<Ensemble>(t % 3);
    const Vector x = random_vector(stream, n, ens);
    const double lhs = vec_p_norm(x, e.p());
    const double rhs = scale * vec_p_norm(x, e.conjugate());
    if (rhs == 0.0) continue;
    report.max_ratio = std::max(report.max_ratio, lhs / rhs);
    if (lhs > rhs * (1.0 + 1e-12)) {
      report.violations.push_back({t, lhs, rhs, stream.seed()});
    }
  }
  return report;
}

OpNormBoundReport check_opnorm_bounds(const Matrix& a, const Exponent& e,
                                      const OpNormOptions& opts) {
  OpNormBoundReport report;
  const double scale =
      std::pow(static_cast<double>(a.rows()), e.delta());
  report.lower_as_domain_map = opnorm_lower(a, e, opts).lower;
  report.bound_as_domain_map = entrywise_norm(a, e.conjugate()) * scale;
  const Matrix at = a.transpose();
  report.lower_transposed = opnorm_lower(at, e, opts).lower;
  report.bound_transposed = entrywise_norm(at, e.p()) * scale;
  const double slack = 1.0 + 1e-12;
  report.ok = report.lower_as_domain_map <= report.bound_as_domain_map * slack &&
              report.lower_transposed <= report.bound_transposed * slack;
  return report;
}

}  // namespace popspace
