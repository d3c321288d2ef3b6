#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "ict/types.hpp"

namespace ict {

/// sign * sqrt(radicand) with an exact non-negative rational radicand.
/// Rounding to binary64 happens once, in to_double().
class ExactRadical {
 public:
  ExactRadical() : sign_(0), radicand_(0) {}
  ExactRadical(int sign, mpq_class radicand);

  static ExactRadical zero() { return ExactRadical(); }
  /// Exact rational r as a radical: sign(r) * sqrt(r^2).
  static ExactRadical from_rational(const mpq_class& r);

  int sign() const { return sign_; }
  const mpq_class& radicand() const { return radicand_; }
  bool is_zero() const { return sign_ == 0; }

  ExactRadical operator-() const { return ExactRadical(-sign_, radicand_); }
  /// Product stays in the field: sqrt(a)*sqrt(b) = sqrt(ab).
  ExactRadical operator*(const ExactRadical& o) const;

  double to_double() const;
  std::string str() const;

  bool operator==(const ExactRadical& o) const {
    return sign_ == o.sign_ && (sign_ == 0 || radicand_ == o.radicand_);
  }

 private:
  int sign_;
  mpq_class radicand_;
};

/// Exact Wigner-3j symbol via the Racah factorial sum in arbitrary-precision
/// integers. Weights and projections are passed doubled (2j, 2m). Returns
/// exact zero when the triangle condition fails or m1+m2+m3 != 0; throws
/// std::invalid_argument when some m is not a valid projection of its j.
ExactRadical wigner3j(Weight j1, Weight j2, Weight j3, int m1_doubled, int m2_doubled,
                      int m3_doubled);

/// Multiplicity of the weight-l irreducible component of a rank-n Cartesian
/// tensor, evaluated exactly (alternating factorial sum in big integers).
/// Returns 0 for l > n.
std::uint64_t multiplicity(int n, Weight l);

/// dim End((R^3)^{x n}) = sum_l multiplicity(n,l)^2.
std::uint64_t end_dimension(int n);

}  // namespace ict
