#include "ict/equimap.hpp"

#include <algorithm>
#include <map>

#include "ict/parallel.hpp"

namespace ict {

namespace {

using cd = std::complex<double>;

/// Path matrices of every term, shared per path; key is the position in the
/// term's enumeration order.
template <typename Scalar>
struct SpaceStacks {
  std::vector<Path> paths;
  std::vector<int> q;
  std::vector<std::shared_ptr<const Mat<Scalar>>> mats;
};

template <typename Scalar>
SpaceStacks<Scalar> build_stacks(const SpaceSpec& spec, BasisKind basis, int threads) {
  spec.validate();
  if constexpr (!std::is_same_v<Scalar, double>) {
    if (basis == BasisKind::Cartesian)
      throw std::invalid_argument("Cartesian basis is not defined for SU2");
  }
  SpaceStacks<Scalar> st;
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    Term term = spec.terms[t];
    if (spec.group != Group::O3) term.parity = 1;
    auto mats = build_term_path_matrices<Scalar>(term, static_cast<int>(t), threads);
    for (auto& pm : mats) {
      if constexpr (std::is_same_v<Scalar, double>) {
        if (basis == BasisKind::Cartesian)
          pm.entries = convert_rows_basis(pm.entries, term, BasisKind::Spherical, BasisKind::Cartesian);
      }
      st.paths.push_back(pm.path);
      st.mats.push_back(std::make_shared<const Mat<Scalar>>(std::move(pm.entries)));
    }
  }
  st.q = path_q_indices(st.paths);
  return st;
}

}  // namespace

template <typename Scalar>
std::vector<BasisElement<Scalar>> hom_basis(const SpaceSpec& vin, const SpaceSpec& vout,
                                            const BasisOptions& opts) {
  if (vin.group != vout.group) throw std::invalid_argument("hom_basis: group mismatch");
  const auto in_st = build_stacks<Scalar>(vin, opts.basis, opts.threads);
  const auto out_st = build_stacks<Scalar>(vout, opts.basis, opts.threads);

  // indices per terminal (l, parity), in enumeration order
  std::map<TerminalKey, std::vector<std::size_t>> in_groups, out_groups;
  for (std::size_t i = 0; i < in_st.paths.size(); ++i)
    in_groups[{in_st.paths[i].terminal(), in_st.paths[i].terminal_parity}].push_back(i);
  for (std::size_t i = 0; i < out_st.paths.size(); ++i)
    out_groups[{out_st.paths[i].terminal(), out_st.paths[i].terminal_parity}].push_back(i);

  std::vector<BasisElement<Scalar>> out;
  for (const auto& [key, outs] : out_groups) {
    auto it = in_groups.find(key);
    if (it == in_groups.end()) continue;  // terminal missing on one side: dropped
    for (std::size_t o : outs)
      for (std::size_t i : it->second) {
        BasisElement<Scalar> e;
        e.out_path = out_st.paths[o];
        e.in_path = in_st.paths[i];
        e.out_q = out_st.q[o];
        e.in_q = in_st.q[i];
        e.out_mat = out_st.mats[o];
        e.in_mat = in_st.mats[i];
        e.frobenius_normalized = opts.frobenius_normalized;
        out.push_back(std::move(e));
      }
  }
  // (l, parity, out term, out q, in term, in q); groups came out in (l,p) order
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    const auto ka = std::tuple(a.weight().doubled(), a.parity(), a.out_path.term_index, a.out_q,
                               a.in_path.term_index, a.in_q);
    const auto kb = std::tuple(b.weight().doubled(), b.parity(), b.out_path.term_index, b.out_q,
                               b.in_path.term_index, b.in_q);
    return ka < kb;
  });
  return out;
}

template <typename Scalar>
std::vector<BasisElement<Scalar>> end_basis(int rank, Group group, const BasisOptions& opts) {
  const SpaceSpec spec = cartesian_space(rank, group);
  return hom_basis<Scalar>(spec, spec, opts);
}

template <typename Scalar>
FactoredEquivariantMap<Scalar> factored_map(const SpaceSpec& vin, const SpaceSpec& vout,
                                            const BasisOptions& opts) {
  if (vin.group != vout.group) throw std::invalid_argument("factored_map: group mismatch");
  const auto in_st = build_stacks<Scalar>(vin, opts.basis, opts.threads);
  const auto out_st = build_stacks<Scalar>(vout, opts.basis, opts.threads);

  std::map<TerminalKey, typename FactoredEquivariantMap<Scalar>::Block> blocks;
  for (std::size_t i = 0; i < in_st.paths.size(); ++i) {
    const TerminalKey key{in_st.paths[i].terminal(), in_st.paths[i].terminal_parity};
    auto& b = blocks[key];
    b.in_terms.push_back(in_st.paths[i].term_index);
    b.in_qs.push_back(in_st.q[i]);
    b.in_stack.push_back(in_st.mats[i]);
  }
  for (std::size_t i = 0; i < out_st.paths.size(); ++i) {
    const TerminalKey key{out_st.paths[i].terminal(), out_st.paths[i].terminal_parity};
    auto it = blocks.find(key);
    if (it == blocks.end()) continue;
    it->second.out_terms.push_back(out_st.paths[i].term_index);
    it->second.out_qs.push_back(out_st.q[i]);
    it->second.out_stack.push_back(out_st.mats[i]);
  }

  FactoredEquivariantMap<Scalar> fmap;
  fmap.vin = vin;
  fmap.vout = vout;
  fmap.basis = opts.basis;
  for (auto& [key, b] : blocks) {
    if (b.out_stack.empty() || b.in_stack.empty()) continue;  // unmatched terminal
    b.l = key.first;
    b.parity = key.second;
    b.mix = Mat<Scalar>::Zero(static_cast<Eigen::Index>(b.out_stack.size()),
                              static_cast<Eigen::Index>(b.in_stack.size()));
    fmap.blocks.push_back(std::move(b));
  }
  return fmap;
}

template <typename Scalar>
Vec<Scalar> apply_map(const FactoredEquivariantMap<Scalar>& fmap, const Vec<Scalar>& v) {
  if (v.size() != fmap.vin.dim()) throw std::invalid_argument("apply_map: vector length mismatch");
  Vec<Scalar> out = Vec<Scalar>::Zero(fmap.vout.dim());
  for (const auto& b : fmap.blocks) {
    const int d = b.l.dim();
    // spherical coordinates of v along every input path of this block
    Mat<Scalar> s(d, static_cast<Eigen::Index>(b.in_stack.size()));
    for (std::size_t q = 0; q < b.in_stack.size(); ++q) {
      const auto& pin = *b.in_stack[q];
      s.col(q) = pin.adjoint() * v.segment(fmap.vin.term_offset(b.in_terms[q]), pin.rows());
    }
    const Mat<Scalar> t = s * b.mix.transpose();  // column r: mixed coords for out path r
    for (std::size_t r = 0; r < b.out_stack.size(); ++r) {
      const auto& pout = *b.out_stack[r];
      out.segment(fmap.vout.term_offset(b.out_terms[r]), pout.rows()) += pout * t.col(r);
    }
  }
  return out;
}

template <typename Scalar>
Scalar frobenius_inner(const BasisElement<Scalar>& a, const BasisElement<Scalar>& b) {
  if (a.out_path.term_index != b.out_path.term_index ||
      a.in_path.term_index != b.in_path.term_index)
    return Scalar(0);  // disjoint blocks
  // <A1 B1^H, A2 B2^H>_F = sum (A1^H A2) .* conj(B1^H B2)
  const Mat<Scalar> g_out = a.out_mat->adjoint() * *b.out_mat;
  const Mat<Scalar> g_in = a.in_mat->adjoint() * *b.in_mat;
  return Scalar(a.scale() * b.scale()) * (g_in.conjugate().cwiseProduct(g_out)).sum();
}

template <typename Scalar>
std::pair<std::vector<Scalar>, Mat<Scalar>> project_to_equivariant(
    const Mat<Scalar>& m, const std::vector<BasisElement<Scalar>>& basis, const SpaceSpec& vin,
    const SpaceSpec& vout) {
  if (m.rows() != vout.dim() || m.cols() != vin.dim())
    throw std::invalid_argument("project_to_equivariant: matrix shape mismatch");
  std::vector<Scalar> coeffs;
  coeffs.reserve(basis.size());
  Mat<Scalar> projected = Mat<Scalar>::Zero(m.rows(), m.cols());
  for (const auto& e : basis) {
    if (!e.frobenius_normalized)
      throw std::invalid_argument("project_to_equivariant: basis must be Frobenius-normalized");
    const Eigen::Index r0 = vout.term_offset(e.out_path.term_index);
    const Eigen::Index c0 = vin.term_offset(e.in_path.term_index);
    const auto block = m.block(r0, c0, e.out_mat->rows(), e.in_mat->rows());
    // <B, M> on the block: tr((P_out P_in^H)^H M) = tr(P_out^H M P_in)
    const Scalar c = Scalar(e.scale()) * (e.out_mat->adjoint() * block * *e.in_mat).trace();
    projected.block(r0, c0, e.out_mat->rows(), e.in_mat->rows()) += c * e.block();
    coeffs.push_back(c);
  }
  return {std::move(coeffs), std::move(projected)};
}

template std::vector<BasisElement<double>> hom_basis<double>(const SpaceSpec&, const SpaceSpec&,
                                                             const BasisOptions&);
template std::vector<BasisElement<cd>> hom_basis<cd>(const SpaceSpec&, const SpaceSpec&,
                                                     const BasisOptions&);
template std::vector<BasisElement<double>> end_basis<double>(int, Group, const BasisOptions&);
template std::vector<BasisElement<cd>> end_basis<cd>(int, Group, const BasisOptions&);
template FactoredEquivariantMap<double> factored_map<double>(const SpaceSpec&, const SpaceSpec&,
                                                             const BasisOptions&);
template FactoredEquivariantMap<cd> factored_map<cd>(const SpaceSpec&, const SpaceSpec&,
                                                     const BasisOptions&);
template Vec<double> apply_map(const FactoredEquivariantMap<double>&, const Vec<double>&);
template Vec<cd> apply_map(const FactoredEquivariantMap<cd>&, const Vec<cd>&);
template double frobenius_inner(const BasisElement<double>&, const BasisElement<double>&);
template cd frobenius_inner(const BasisElement<cd>&, const BasisElement<cd>&);
template std::pair<std::vector<double>, Mat<double>> project_to_equivariant(
    const Mat<double>&, const std::vector<BasisElement<double>>&, const SpaceSpec&, const SpaceSpec&);
template std::pair<std::vector<cd>, Mat<cd>> project_to_equivariant(
    const Mat<cd>&, const std::vector<BasisElement<cd>>&, const SpaceSpec&, const SpaceSpec&);

}  // namespace ict
