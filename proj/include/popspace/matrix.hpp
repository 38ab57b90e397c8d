#pragma once

#include <Eigen/Dense>
#include <complex>

#include "popspace/exponent.hpp"
#include "popspace/rng.hpp"

namespace popspace {

using Scalar = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline void require_finite(const Matrix& a, const char* what = "matrix") {
  if (!a.allFinite()) {
    throw InputError(std::string(what) + " has non-finite entries");
  }
}

inline void require_finite(const Vector& x, const char* what = "vector") {
  if (!x.allFinite()) {
    throw InputError(std::string(what) + " has non-finite entries");
  }
}

// complex sign z/|z|, zero at the origin
inline Scalar csign(Scalar z) {
  const double a = std::abs(z);
  return a == 0.0 ? Scalar(0.0) : z / a;
}

// Random ensembles. Extremizers of the inequalities under test are often
// sparse or heavy-tailed, so the sweeps mix all three.
enum class Ensemble { Gaussian, HeavyTailed, Sparse };

Matrix random_matrix(Rng& rng, Index rows, Index cols,
                     Ensemble ensemble = Ensemble::Gaussian);
Vector random_vector(Rng& rng, Index size,
                     Ensemble ensemble = Ensemble::Gaussian);

}  // namespace popspace
