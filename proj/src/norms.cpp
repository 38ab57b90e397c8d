#include "popspace/norms.hpp"

#include <cmath>

namespace popspace {

double vec_p_norm(const Vector& x, double p) {
  if (x.size() == 0) throw InputError("vec_p_norm: empty vector");
  require_finite(x);
  if (std::isnan(p) || p < 1.0) {
    throw InputError("vec_p_norm: exponent must lie in [1, inf]");
  }
  const double m = x.cwiseAbs().maxCoeff();
  if (m == 0.0 || std::isinf(p)) return m;
  if (p == 2.0) return x.norm();
  if (p == 1.0) return x.cwiseAbs().sum();
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]) / m;
    if (a > 0.0) s += std::pow(a, p);
  }
  return m * std::pow(s, 1.0 / p);
}

double vec_p_norm(const Vector& x, const Exponent& e) {
  return vec_p_norm(x, e.p());
}

double entrywise_norm(const Matrix& a, double q) {
  if (a.size() == 0) throw InputError("entrywise_norm: empty matrix");
  return vec_p_norm(Vector(a.reshaped()), q);
}

double entrywise_norm(const Matrix& a, const Exponent& e) {
  return entrywise_norm(a, e.p());
}

Vector duality_map(const Vector& x, double q) {
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]);
    out[i] = a == 0.0 ? Scalar(0.0) : std::pow(a, q - 1.0) * csign(x[i]);
  }
  return out;
}

Vector holder_dual(const Vector& x, const Exponent& e) {
  const double pc = e.conjugate();
  const double nrm = vec_p_norm(x, pc);
  if (nrm == 0.0) return Vector::Zero(x.size());
  Vector a(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double m = std::abs(x[i]) / nrm;
    a[i] = m == 0.0 ? Scalar(0.0)
                    : std::pow(m, pc - 1.0) * std::conj(csign(x[i]));
  }
  return a;
}

}  // namespace popspace
