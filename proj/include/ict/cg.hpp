#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "ict/types.hpp"

namespace ict {

/// Dense (2l1+1) x (2l2+1) x (2lo+1) Clebsch-Gordan tensor. Index order is
/// (m1, m2, mo) row-major; flattened() merges (m1, m2) with m1 most
/// significant, giving the (2l1+1)(2l2+1) x (2lo+1) CG matrix.
template <typename Scalar>
struct CGTensor {
  Weight l1, l2, lo;
  std::vector<Scalar> entries;

  int d1() const { return l1.dim(); }
  int d2() const { return l2.dim(); }
  int d3() const { return lo.dim(); }

  const Scalar& at(int i1, int i2, int i3) const {
    return entries[static_cast<std::size_t>((i1 * d2() + i2) * d3() + i3)];
  }
  Scalar& at(int i1, int i2, int i3) {
    return entries[static_cast<std::size_t>((i1 * d2() + i2) * d3() + i3)];
  }

  /// Slice at fixed first index: contiguous d2 x d3 row-major block.
  Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
  slice(int i1) const {
    return {entries.data() + static_cast<std::size_t>(i1) * d2() * d3(), d2(), d3()};
  }

  Mat<Scalar> flattened() const {
    Mat<Scalar> m(d1() * d2(), d3());
    for (int i1 = 0; i1 < d1(); ++i1)
      for (int i2 = 0; i2 < d2(); ++i2)
        for (int i3 = 0; i3 < d3(); ++i3) m(i1 * d2() + i2, i3) = at(i1, i2, i3);
    return m;
  }
};

/// SU(2) CG tensor in the complex spherical basis (values are real, stored
/// complex): C^{l1 l2 lo}_{m1 m2 mo} = (-1)^{l1-l2+mo} sqrt(2lo+1) *
/// wigner3j(l1,l2,lo; m1,m2,-mo). Throws std::domain_error when the triangle
/// condition fails.
CGTensor<std::complex<double>> cg_complex(Weight l1, Weight l2, Weight lo);

/// Unitary change of basis from complex to real spherical harmonics
/// (Condon-Shortley phase, sin/cos real combination), rows and columns
/// indexed by m ascending from -l. Integer l only.
MatC complex_to_real_basis(Weight l);

/// Real-basis CG tensor for O(3)/SO(3): cg_complex conjugated by the
/// complex-to-real transforms, times a global phase i^{(l1+l2+lo) mod 2}
/// that makes every entry real. Throws std::runtime_error if any imaginary
/// residue exceeds 1e-12.
CGTensor<double> cg_real(Weight l1, Weight l2, Weight lo);

/// Memoized accessors; values are bit-identical for repeated calls so
/// concurrent first-writers are benign.
std::shared_ptr<const CGTensor<double>> cg_real_cached(Weight l1, Weight l2, Weight lo);
/// Drops memoized tensors (cold-cache benchmarking).
void clear_cg_caches();
std::shared_ptr<const CGTensor<std::complex<double>>> cg_complex_cached(Weight l1, Weight l2,
                                                                        Weight lo);

/// Lane selector used by the scalar-templated path-matrix builder.
template <typename Scalar>
std::shared_ptr<const CGTensor<Scalar>> cg_cached(Weight l1, Weight l2, Weight lo);

template <>
inline std::shared_ptr<const CGTensor<double>> cg_cached<double>(Weight l1, Weight l2, Weight lo) {
  return cg_real_cached(l1, l2, lo);
}
template <>
inline std::shared_ptr<const CGTensor<std::complex<double>>> cg_cached<std::complex<double>>(
    Weight l1, Weight l2, Weight lo) {
  return cg_complex_cached(l1, l2, lo);
}

}  // namespace ict
