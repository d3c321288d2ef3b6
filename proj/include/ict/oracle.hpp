#pragma once

#include <array>
#include <cstdint>

#include "ict/pathmat.hpp"
#include "ict/scheme.hpp"

namespace ict {

struct OracleReport {
  Eigen::Index dimension = 0;
  std::vector<double> principal_angles;  // filled when compared against another span
  std::vector<double> residual_norms;    // ||rho_out M - M rho_in||_F per basis vector
  double spectrum_gap = 0;               // smallest kept/discarded singular-value gap
};

/// Orthonormal basis of { M : rho_out(g) M = M rho_in(g) }, columns holding
/// column-major vec(M) with M of shape dim(vout) x dim(vin).
template <typename Scalar>
struct CommutantBasis {
  Mat<Scalar> vectors;
  OracleReport report;
};

/// Numeric ground truth for the equivariant space, independent of the
/// path-matrix construction. The first sampled element's constraint is solved
/// exactly from its Schur block structure; the remaining sampled constraints
/// are stacked in that nullspace and factored by a dense SVD. Right-singular
/// directions with sigma < 1e-8 * sigma_max are kept; the oracle refuses to
/// answer (throws) unless kept and discarded values are separated by at least
/// a 1e4 gap at every stage. Deterministic for a fixed seed.
///
/// Preconditions: dim(vin)*dim(vout) <= cap (std::length_error otherwise),
/// n_samples >= 8. For O3 half of the trailing samples carry the inversion.
template <typename Scalar>
CommutantBasis<Scalar> commutant_nullspace(const SpaceSpec& vin, const SpaceSpec& vout,
                                           int n_samples = 8, std::uint64_t seed = 20240925,
                                           Eigen::Index cap = 10000);

/// Classical rank-2 projectors in the Cartesian basis: trace, antisymmetric
/// and symmetric-traceless parts. Rows/columns index (i,j) pairs.
std::array<MatD, 3> classical_rank2_projectors();

/// Path-count recursion N(n, l) over the classic scheme: bridge 1 for
/// O3/SO3, bridge 1/2 for SU2. Independent of the multiplicity formula.
std::uint64_t path_count_recursive(int n, Weight l, Group group = Group::O3);

/// Principal angles (radians, ascending) between the column spans of two
/// orthonormal-column matrices.
template <typename Scalar>
std::vector<double> principal_angles(const Mat<Scalar>& a, const Mat<Scalar>& b);

}  // namespace ict
