#pragma once

#include "popspace/matrix.hpp"

namespace popspace {

// (sum_i |x_i|^p)^{1/p} for p in [1, inf]; p = inf gives max_i |x_i|.
// Scaled by the sup norm first so large exponents do not overflow.
double vec_p_norm(const Vector& x, double p);
double vec_p_norm(const Vector& x, const Exponent& e);

// q-norm of the flattened entry vector, q in [1, inf]
double entrywise_norm(const Matrix& a, double q);
double entrywise_norm(const Matrix& a, const Exponent& e);

// duality map J_q(x)_i = |x_i|^{q-1} sign(x_i)
Vector duality_map(const Vector& x, double q);

// the unit-l_p vector a with sum_i a_i x_i = ||x||_{p'}; zero stays zero
Vector holder_dual(const Vector& x, const Exponent& e);

}  // namespace popspace
