#pragma once

#include <memory>
#include <random>
#include <vector>

#include "ict/cg.hpp"
#include "ict/types.hpp"

namespace ict {

/// O(3)/SO(3) element, split as sigma = det(Q) and rotation R = sigma * Q.
struct GroupElement {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  int sigma = 1;

  GroupElement inverse() const { return {rotation.transpose(), sigma}; }
  GroupElement operator*(const GroupElement& o) const { return {rotation * o.rotation, sigma * o.sigma}; }
  /// The natural 3x3 matrix sigma * R.
  Eigen::Matrix3d natural() const { return sigma * rotation; }
};

/// Validates orthogonality (||Q^T Q - I||_max < 1e-12) before splitting.
GroupElement group_element_from_orthogonal(const Eigen::Matrix3d& q);

struct SU2Element {
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  SU2Element inverse() const { return {u.adjoint()}; }
  SU2Element operator*(const SU2Element& o) const { return {u * o.u}; }
};

SU2Element su2_element_from_unitary(const Eigen::Matrix2cd& u);

/// Gaussian QR sample; determinant sign fixed explicitly to +1.
GroupElement random_rotation(std::mt19937_64& rng);
/// Rotation, composed with the inversion when requested.
GroupElement random_o3_element(std::mt19937_64& rng, bool with_inversion);
/// Haar sample via a unit quaternion.
SU2Element random_su2(std::mt19937_64& rng);

/// Fixed change of basis mapping Cartesian (x,y,z) to the real-spherical
/// m = (-1,0,1) component order (y,z,x).
const Eigen::Matrix3d& cartesian_to_spherical_l1();

/// Weight-l representation matrix. For the real lane the element is a
/// GroupElement and parity enters as chi_p(sigma); for SU2 the element is an
/// SU2Element and parity is ignored. Built as P^T rho(g) P over the maximal
/// classic path ending at l, so it needs no closed-form Wigner formulas.
MatD wigner_d(Weight l, const GroupElement& g, int parity);
MatC wigner_d(Weight j, const SU2Element& g, int parity = 1);

enum class BasisKind { Spherical, Cartesian };

/// Orthonormal-column matrix mapping the weight-l spherical component into a
/// term's tensor-product space. Row layout: factor 0 varies fastest, the
/// last factor is most significant.
template <typename Scalar>
struct PathMatrix {
  Path path;
  Mat<Scalar> entries;
  BasisKind basis = BasisKind::Spherical;
  bool col_norm_applied = true;
};

/// Chained CG contraction along `path` followed by column normalization.
/// Throws std::invalid_argument if the path is inconsistent with the term.
template <typename Scalar>
PathMatrix<Scalar> build_path_matrix(const Path& path, const Term& term);

/// One contraction step: next[(a,r), c] = sum_j prev[r,j] * C[a,j,c].
template <typename Scalar>
Mat<Scalar> contract_step(const Mat<Scalar>& prev, const CGTensor<Scalar>& cg);

/// Applies M along tensor mode `mode` of x, where mode k has stride
/// prod_{j<k} dims[j] (factor 0 fastest).
template <typename Scalar>
Vec<Scalar> mode_apply(const std::vector<Eigen::Index>& dims, int mode, const Mat<Scalar>& m,
                       const Vec<Scalar>& x);

/// y = (M_{k-1} (x) ... (x) M_0) x with factor 0 fastest; factors[i] acts on
/// mode i and may change its dimension.
template <typename Scalar>
Vec<Scalar> kron_apply(const std::vector<Mat<Scalar>>& factors, const Vec<Scalar>& x);

/// Converts path-matrix rows of weight-1 factors between the spherical and the
/// Cartesian basis (exact: the l=1 change of basis is a permutation).
MatD convert_rows_basis(const MatD& m, const Term& term, BasisKind from, BasisKind to);

namespace detail {
template <typename Scalar>
struct Lane;

template <>
struct Lane<double> {
  using Element = GroupElement;
  static MatD irrep(Weight l, const Element& g, int parity) { return wigner_d(l, g, parity); }
};
template <>
struct Lane<std::complex<double>> {
  using Element = SU2Element;
  static MatC irrep(Weight l, const Element& g, int parity) { return wigner_d(l, g, parity); }
};
}  // namespace detail

/// Representation matrix of one term: Kronecker product of factor irreps in
/// reverse factor order (matching the path-matrix row layout), with the term
/// parity applied once. `basis` selects Cartesian rows for weight-1 factors.
template <typename Scalar>
Mat<Scalar> term_rep_matrix(const Term& term, const typename detail::Lane<Scalar>::Element& g,
                            BasisKind basis = BasisKind::Spherical);

/// Matrix-free action of one term's representation on a term-space vector.
template <typename Scalar>
Vec<Scalar> term_rep_apply(const Term& term, const typename detail::Lane<Scalar>::Element& g,
                           const Vec<Scalar>& v, BasisKind basis = BasisKind::Spherical);

/// Block-diagonal representation matrix over all terms of the spec.
template <typename Scalar>
Mat<Scalar> rep_matrix(const SpaceSpec& spec, const typename detail::Lane<Scalar>::Element& g,
                       BasisKind basis = BasisKind::Spherical);

/// Matrix-free action of rep_matrix on a stacked direct-sum vector.
template <typename Scalar>
Vec<Scalar> rep_apply(const SpaceSpec& spec, const typename detail::Lane<Scalar>::Element& g,
                      const Vec<Scalar>& v, BasisKind basis = BasisKind::Spherical);

}  // namespace ict
