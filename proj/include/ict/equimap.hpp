#pragma once

#include <memory>

#include "ict/decomp.hpp"

namespace ict {

/// One element phat_out * phat_in^H of the equivariant basis, kept factored;
/// dense form embeds as a single nonzero block of the dim(vout) x dim(vin)
/// map. Normalized elements are divided by sqrt(2l+1) so the Frobenius norm
/// is 1.
template <typename Scalar>
struct BasisElement {
  Path out_path, in_path;  // matching terminal (l, parity)
  int out_q = 1, in_q = 1;
  std::shared_ptr<const Mat<Scalar>> out_mat, in_mat;
  bool frobenius_normalized = true;

  Weight weight() const { return out_path.terminal(); }
  int parity() const { return out_path.terminal_parity; }
  double scale() const { return frobenius_normalized ? 1.0 / std::sqrt(double(weight().dim())) : 1.0; }

  /// The nonzero block phat_out * phat_in^H (times the normalization).
  Mat<Scalar> block() const { return scale() * Mat<Scalar>(*out_mat * in_mat->adjoint()); }
  /// Full dim(vout) x dim(vin) matrix with the block at (out term, in term).
  Mat<Scalar> dense(const SpaceSpec& vin, const SpaceSpec& vout) const {
    Mat<Scalar> m = Mat<Scalar>::Zero(vout.dim(), vin.dim());
    m.block(vout.term_offset(out_path.term_index), vin.term_offset(in_path.term_index),
            out_mat->rows(), in_mat->rows()) = block();
    return m;
  }
};

struct BasisOptions {
  bool frobenius_normalized = true;
  BasisKind basis = BasisKind::Spherical;
  int threads = -1;
};

/// Orthogonal basis of Hom_G(vin, vout): every input path paired with every
/// output path sharing the terminal (l, p), ordered by (l, parity, out term,
/// out q, in term, in q). Size equals hom_dimension(vin, vout).
template <typename Scalar>
std::vector<BasisElement<Scalar>> hom_basis(const SpaceSpec& vin, const SpaceSpec& vout,
                                            const BasisOptions& opts = {});

/// End basis of the rank-n Cartesian space; the in_path == out_path subset
/// reproduces the decompose() projectors.
template <typename Scalar>
std::vector<BasisElement<Scalar>> end_basis(int rank, Group group = Group::O3,
                                            const BasisOptions& opts = {});

/// Factored equivariant map: per matched terminal (l,p), the output path
/// stack, a (#out x #in) mix matrix of free coefficients, and the input path
/// stack. Fresh maps have all mix entries zero.
template <typename Scalar>
struct FactoredEquivariantMap {
  struct Block {
    Weight l;
    int parity = 1;
    // per stack position: owning term index and the in-group label q
    std::vector<int> out_terms, in_terms;
    std::vector<int> out_qs, in_qs;
    std::vector<std::shared_ptr<const Mat<Scalar>>> out_stack, in_stack;
    Mat<Scalar> mix;  // rows: out paths, cols: in paths
  };
  SpaceSpec vin, vout;
  BasisKind basis = BasisKind::Spherical;
  std::vector<Block> blocks;  // ordered by (l, parity)

  std::size_t coefficient_count() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += static_cast<std::size_t>(b.mix.size());
    return n;
  }
};

template <typename Scalar>
FactoredEquivariantMap<Scalar> factored_map(const SpaceSpec& vin, const SpaceSpec& vout,
                                            const BasisOptions& opts = {});

/// out = sum over blocks of out_stack (mix x I_{2l+1}) in_stack^H v; equals
/// the dense linear combination of unnormalized basis elements with the mix
/// entries as coefficients.
template <typename Scalar>
Vec<Scalar> apply_map(const FactoredEquivariantMap<Scalar>& fmap, const Vec<Scalar>& v);

/// Coefficients <B_i, M>_F and the projection sum_i c_i B_i onto the
/// equivariant subspace. Requires a Frobenius-normalized basis.
template <typename Scalar>
std::pair<std::vector<Scalar>, Mat<Scalar>> project_to_equivariant(
    const Mat<Scalar>& m, const std::vector<BasisElement<Scalar>>& basis, const SpaceSpec& vin,
    const SpaceSpec& vout);

/// Frobenius inner product <A, B> = sum conj(A_ij) B_ij of two factored
/// elements, computed without dense assembly.
template <typename Scalar>
Scalar frobenius_inner(const BasisElement<Scalar>& a, const BasisElement<Scalar>& b);

}  // namespace ict
