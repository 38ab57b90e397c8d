#pragma once

#include <cmath>
#include <stdexcept>

namespace popspace {

// Input-contract violations (bad exponents, malformed matrices, size
// mismatches). The CLI maps these to exit code 1.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A Holder pair (p, p') with 1/p + 1/p' = 1 and the comparison constant
// exponent delta = |1/p - 1/p'|. Operator-norm machinery requires
// 1 < p < infinity; the endpoint exponents are accepted only by the plain
// vector/entrywise norms, which take a raw double instead.
class Exponent {
 public:
  explicit Exponent(double p) : p_(p) {
    if (!std::isfinite(p) || !(p > 1.0)) {
      throw InputError("exponent p must satisfy 1 < p < infinity");
    }
    conjugate_ = p / (p - 1.0);
    delta_ = std::abs(1.0 / p - 1.0 / conjugate_);
    if (p == 2.0) delta_ = 0.0;
  }

  double p() const { return p_; }
  double conjugate() const { return conjugate_; }
  double delta() const { return delta_; }

  // the same pair viewed from p': swaps the roles of p and p'
  Exponent dual() const { return Exponent(conjugate_); }

 private:
  double p_;
  double conjugate_;
  double delta_;
};

}  // namespace popspace
