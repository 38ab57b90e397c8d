#include "popspace/matrix.hpp"

#include <cmath>

namespace popspace {

Matrix random_matrix(Rng& rng, Index rows, Index cols, Ensemble ensemble) {
  Matrix a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      switch (ensemble) {
        case Ensemble::Gaussian:
          a(i, j) = rng.complex_normal();
          break;
        case Ensemble::HeavyTailed: {
          const Scalar z = rng.complex_normal();
          const double d = std::abs(rng.normal());
          a(i, j) = z / (d + 1e-3);
          break;
        }
        case Ensemble::Sparse: {
          const Scalar z = rng.complex_normal();
          a(i, j) = rng.uniform() < 0.35 ? z : Scalar(0.0);
          break;
        }
      }
    }
  }
  return a;
}

Vector random_vector(Rng& rng, Index size, Ensemble ensemble) {
  return Vector(random_matrix(rng, size, 1, ensemble));
}

}  // namespace popspace
