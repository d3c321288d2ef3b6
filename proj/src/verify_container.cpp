#include "ict/verify_container.hpp"

#include <map>

#include "ict/equimap.hpp"
#include "ict/oracle.hpp"
#include "ict/parallel.hpp"
#include "ict/specparse.hpp"

namespace ict {

namespace {

using cd = std::complex<double>;

// completeness Gram fits through rank 7; the pairwise projector products are
// exhaustive only through rank 6 (their count grows much faster)
constexpr Eigen::Index kCompletenessDimCap = 2187;
constexpr Eigen::Index kProjectorDimCap = 729;

struct Check {
  ContainerVerifyResult* out;
  std::optional<double> tol_override;
  void add(const std::string& name, double value, double tol, const std::string& note = {}) {
    const double t = tol_override.value_or(tol);
    out->checks.push_back({name, value, t, value < t, note});
  }
  void add_exact(const std::string& name, bool ok, const std::string& note = {}) {
    out->checks.push_back({name, ok ? 0.0 : 1.0, 0.5, ok, note});
  }
};

template <typename Scalar>
const Mat<Scalar>& stored_matrix(const StoredObject& obj);
template <>
const MatD& stored_matrix<double>(const StoredObject& obj) {
  if (obj.dtype != "f64") throw store_error("expected f64 payload", obj.name);
  return obj.f64;
}
template <>
const MatC& stored_matrix<cd>(const StoredObject& obj) {
  if (obj.dtype != "c128") throw store_error("expected c128 payload", obj.name);
  return obj.c128;
}

// Cartesian-to-spherical conversion for the oracle comparison (the oracle's
// representation matrices live in the spherical basis; the l=1 change of
// basis is an exact permutation, so nothing is lost).
template <typename Scalar>
Mat<Scalar> cols_to_spherical(const Mat<Scalar>& m, const Term& term, BasisKind basis);
template <>
MatD cols_to_spherical<double>(const MatD& m, const Term& term, BasisKind basis) {
  if (basis != BasisKind::Cartesian) return m;
  return convert_rows_basis(m, term, BasisKind::Cartesian, BasisKind::Spherical);
}
template <>
MatC cols_to_spherical<cd>(const MatC& m, const Term&, BasisKind) {
  return m;
}

template <typename Scalar>
Mat<Scalar> map_to_spherical(Mat<Scalar> m, const SpaceSpec& vin, const SpaceSpec& vout,
                             BasisKind basis) {
  if (basis != BasisKind::Cartesian) return m;
  for (std::size_t t = 0; t < vout.terms.size(); ++t) {
    const Eigen::Index r0 = vout.term_offset(t), td = vout.terms[t].dim();
    m.middleRows(r0, td) = cols_to_spherical<Scalar>(m.middleRows(r0, td), vout.terms[t], basis);
  }
  for (std::size_t t = 0; t < vin.terms.size(); ++t) {
    const Eigen::Index c0 = vin.term_offset(t), td = vin.terms[t].dim();
    m.middleCols(c0, td) =
        cols_to_spherical<Scalar>(m.middleCols(c0, td).transpose(), vin.terms[t], basis)
            .transpose();
  }
  return m;
}

template <typename Scalar>
std::vector<typename detail::Lane<Scalar>::Element> verify_samples(Group group, int n,
                                                                   std::uint64_t seed);
template <>
std::vector<GroupElement> verify_samples<double>(Group group, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GroupElement> out;
  for (int i = 0; i < n; ++i)
    out.push_back(random_o3_element(rng, group == Group::O3 && i % 2 == 1));
  return out;
}
template <>
std::vector<SU2Element> verify_samples<cd>(Group group, int n, std::uint64_t seed) {
  if (group != Group::SU2) throw store_error("complex payload in a non-SU2 container");
  std::mt19937_64 rng(seed);
  std::vector<SU2Element> out;
  for (int i = 0; i < n; ++i) out.push_back(random_su2(rng));
  return out;
}

template <typename Scalar>
void verify_decompose_container(const Container& c, const SpaceSpec& spec, BasisKind basis,
                                const ContainerVerifyOptions& opts, Check& check,
                                ContainerVerifyResult& result) {
  std::vector<Projector<Scalar>> projs;
  std::vector<const StoredObject*> mats;
  for (const auto& obj : c.objects)
    if (obj.kind == "path_matrix") mats.push_back(&obj);
  if (mats.empty()) {
    result.notes.push_back("no path matrices stored");
    return;
  }

  std::vector<Path> paths;
  for (const auto* m : mats) paths.push_back(*m->path);
  const auto qs = path_q_indices(paths);
  for (std::size_t i = 0; i < mats.size(); ++i) {
    Projector<Scalar> p;
    p.path = paths[i];
    p.q = qs[i];
    p.basis = basis;
    p.phat = stored_matrix<Scalar>(*mats[i]);
    projs.push_back(std::move(p));
  }
  for (const auto& obj : c.objects)
    if (obj.kind == "projector_dense") {
      for (auto& p : projs)
        if (obj.path && p.path == *obj.path) p.dense = stored_matrix<Scalar>(obj);
    }

  // per-term: column orthonormality, cross-path orthogonality, completeness
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    const Eigen::Index dim = spec.terms[t].dim();
    std::vector<const Projector<Scalar>*> mine;
    Eigen::Index covered = 0;
    for (const auto& p : projs)
      if (p.path.term_index == static_cast<int>(t)) {
        mine.push_back(&p);
        covered += p.weight().dim();
      }
    if (mine.empty()) continue;
    const std::string tag = "term" + std::to_string(t);

    double ortho = 0;
    for (const auto* p : mine)
      ortho = std::max(ortho, (Mat<Scalar>(p->phat.adjoint() * p->phat) -
                               Mat<Scalar>::Identity(p->phat.cols(), p->phat.cols()))
                                  .cwiseAbs()
                                  .maxCoeff());
    check.add(tag + ".column_orthonormality", ortho, 1e-11);

    if (covered == dim && dim <= kCompletenessDimCap) {
      Mat<Scalar> d(dim, covered);
      Eigen::Index col = 0;
      for (const auto* p : mine) {
        d.middleCols(col, p->phat.cols()) = p->phat;
        col += p->phat.cols();
      }
      const double res = (Mat<Scalar>(d.adjoint() * d) - Mat<Scalar>::Identity(covered, covered))
                             .cwiseAbs()
                             .maxCoeff();
      check.add(tag + ".completeness", res, 1e-10);
    } else if (covered == dim) {
      // spot-check cross-path orthogonality above the dense cap
      std::mt19937_64 rng(opts.seed);
      double cross = 0;
      for (int k = 0; k < 64 && mine.size() > 1; ++k) {
        const std::size_t i = rng() % mine.size(), j = rng() % mine.size();
        if (i == j) continue;
        cross = std::max(cross,
                         Mat<Scalar>(mine[i]->phat.adjoint() * mine[j]->phat).cwiseAbs().maxCoeff());
      }
      check.add(tag + ".cross_path_orthogonality(sampled)", cross, 1e-9);
    } else {
      result.notes.push_back(tag + ": weight-filtered container, completeness not applicable");
    }
  }

  const VerifyReport rep = verify_decomposition<Scalar>(spec, projs, opts.samples, opts.seed,
                                                        kProjectorDimCap, opts.threads);
  if (rep.partition_applicable)
    check.add("partition_of_identity", rep.partition_residual, 1e-10);
  else
    result.notes.push_back("partition of identity: not applicable (weight filter)");
  check.add("mutual_annihilation", rep.annihilation_residual, 1e-10);
  check.add("idempotence", rep.idempotence_residual, 1e-9);
  check.add("trace", rep.trace_residual, 1e-8);
  check.add("equivariance", rep.equivariance_residual, 1e-9);

  if (opts.with_oracle) {
    const Eigen::Index nn = spec.dim() * spec.dim();
    if (nn > opts.oracle_cap) {
      result.notes.push_back("oracle skipped: dim^2 exceeds cap");
    } else if (!rep.partition_applicable) {
      result.notes.push_back("oracle skipped: weight-filtered container spans a subspace only");
    } else {
      // End basis assembled from the stored path matrices, in the spherical
      // basis where the oracle representation lives.
      std::map<TerminalKey, std::vector<std::size_t>> groups;
      for (std::size_t i = 0; i < projs.size(); ++i)
        groups[{projs[i].weight(), projs[i].parity()}].push_back(i);
      std::vector<Vec<Scalar>> cols;
      for (const auto& [key, members] : groups)
        for (std::size_t a : members)
          for (std::size_t b : members) {
            const Term& ta = spec.terms[projs[a].path.term_index];
            const Term& tb = spec.terms[projs[b].path.term_index];
            const Mat<Scalar> pa = cols_to_spherical<Scalar>(projs[a].phat, ta, basis);
            const Mat<Scalar> pb = cols_to_spherical<Scalar>(projs[b].phat, tb, basis);
            Mat<Scalar> d = Mat<Scalar>::Zero(spec.dim(), spec.dim());
            d.block(spec.term_offset(projs[a].path.term_index),
                    spec.term_offset(projs[b].path.term_index), pa.rows(), pb.rows()) =
                pa * pb.adjoint();
            cols.push_back(Eigen::Map<const Vec<Scalar>>(d.data(), nn));
          }
      Mat<Scalar> ours(nn, static_cast<Eigen::Index>(cols.size()));
      for (std::size_t i = 0; i < cols.size(); ++i) ours.col(static_cast<Eigen::Index>(i)) = cols[i];
      auto oracle = commutant_nullspace<Scalar>(spec, spec, 8, 20240925, opts.oracle_cap);
      check.add_exact("oracle.dimension",
                      oracle.report.dimension == static_cast<Eigen::Index>(cols.size()),
                      std::to_string(oracle.report.dimension) + " vs " +
                          std::to_string(cols.size()));
      if (!cols.empty()) {
        const auto angles = principal_angles<Scalar>(oracle.vectors, ours);
        check.add("oracle.max_principal_angle", angles.empty() ? 0.0 : angles.back(), 1e-7);
      }
    }
  }
}

template <typename Scalar>
void verify_basis_container(const Container& c, const SpaceSpec& vin, const SpaceSpec& vout,
                            BasisKind basis, const ContainerVerifyOptions& opts, Check& check,
                            ContainerVerifyResult& result) {
  // rebuild elements: dense containers store full matrices; factored ones
  // store the path stacks whose pairing is implied by matching terminals
  std::vector<Mat<Scalar>> elems;        // dense dim(vout) x dim(vin)
  std::vector<TerminalKey> elem_keys;
  const bool factored = [&] {
    for (const auto& obj : c.objects)
      if (obj.kind == "mix_shape") return true;
    return false;
  }();

  if (factored) {
    std::map<TerminalKey, std::vector<const StoredObject*>> ins, outs;
    for (const auto& obj : c.objects) {
      if (obj.kind != "path_matrix" || !obj.path) continue;
      const TerminalKey key{obj.path->terminal(), obj.path->terminal_parity};
      if (obj.name.rfind("in/", 0) == 0) ins[key].push_back(&obj);
      else if (obj.name.rfind("out/", 0) == 0) outs[key].push_back(&obj);
    }
    for (const auto& [key, outs_k] : outs) {
      auto it = ins.find(key);
      if (it == ins.end()) continue;
      for (const auto* o : outs_k)
        for (const auto* i : it->second) {
          Mat<Scalar> m = Mat<Scalar>::Zero(vout.dim(), vin.dim());
          const auto& po = stored_matrix<Scalar>(*o);
          const auto& pi = stored_matrix<Scalar>(*i);
          m.block(vout.term_offset(o->path->term_index), vin.term_offset(i->path->term_index),
                  po.rows(), pi.rows()) =
              po * pi.adjoint() / std::sqrt(double(key.first.dim()));
          elems.push_back(std::move(m));
          elem_keys.push_back(key);
        }
    }
  } else {
    for (const auto& obj : c.objects)
      if (obj.kind == "basis_element") {
        elems.push_back(stored_matrix<Scalar>(obj));
        elem_keys.push_back({obj.path->terminal(), obj.path->terminal_parity});
      }
  }

  check.add_exact("count_equals_hom_dimension",
                  elems.size() == hom_dimension(vin, vout),
                  std::to_string(elems.size()) + " vs " + std::to_string(hom_dimension(vin, vout)));

  double norm_dev = 0, pair_max = 0;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    norm_dev = std::max(norm_dev, std::abs(elems[i].norm() - 1.0));
    for (std::size_t j = i + 1; j < elems.size(); ++j)
      pair_max = std::max(pair_max,
                          std::abs(elems[i].conjugate().cwiseProduct(elems[j]).sum()));
  }
  if (!elems.empty()) {
    check.add("frobenius_norm_deviation", norm_dev, 1e-10);
    check.add("frobenius_orthogonality", pair_max, 1e-10);
  }

  const auto elements = verify_samples<Scalar>(vin.group, opts.samples, opts.seed);
  double equiv = 0;
  for (const auto& g : elements) {
    const Mat<Scalar> rin = rep_matrix<Scalar>(vin, g, basis);
    const Mat<Scalar> rout = rep_matrix<Scalar>(vout, g, basis);
    for (const auto& e : elems)
      equiv = std::max(equiv, (rout * e - e * rin).cwiseAbs().maxCoeff());
  }
  if (!elems.empty()) check.add("equivariance", equiv, 1e-9);

  if (opts.with_oracle) {
    const Eigen::Index nn = vin.dim() * vout.dim();
    if (nn > opts.oracle_cap) {
      result.notes.push_back("oracle skipped: dim(vin)*dim(vout) exceeds cap");
    } else {
      Mat<Scalar> ours(nn, static_cast<Eigen::Index>(elems.size()));
      for (std::size_t i = 0; i < elems.size(); ++i) {
        const Mat<Scalar> sph = map_to_spherical<Scalar>(elems[i], vin, vout, basis);
        ours.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vec<Scalar>>(sph.data(), nn);
      }
      auto oracle = commutant_nullspace<Scalar>(vin, vout, 8, 20240925, opts.oracle_cap);
      check.add_exact("oracle.dimension",
                      oracle.report.dimension == static_cast<Eigen::Index>(elems.size()),
                      std::to_string(oracle.report.dimension) + " vs " +
                          std::to_string(elems.size()));
      if (oracle.report.dimension > 0 && !elems.empty()) {
        const auto angles = principal_angles<Scalar>(oracle.vectors, ours);
        check.add("oracle.max_principal_angle", angles.empty() ? 0.0 : angles.back(), 1e-7);
      }
    }
  }
}

template <typename Scalar>
ContainerVerifyResult verify_lane(const Container& c, const ContainerVerifyOptions& opts) {
  ContainerVerifyResult result;
  Check check{&result, opts.tol_override};
  const BasisKind basis =
      c.meta.basis == "cartesian" ? BasisKind::Cartesian : BasisKind::Spherical;
  SpaceSpec vin = parse_space_spec(c.meta.space_spec, c.meta.group);
  if (c.meta.space_spec_out) {
    SpaceSpec vout = parse_space_spec(*c.meta.space_spec_out, c.meta.group);
    verify_basis_container<Scalar>(c, vin, vout, basis, opts, check, result);
  } else {
    verify_decompose_container<Scalar>(c, vin, basis, opts, check, result);
  }
  return result;
}

}  // namespace

ContainerVerifyResult verify_container(const Container& c, const ContainerVerifyOptions& opts) {
  if (c.meta.group == Group::SU2) return verify_lane<cd>(c, opts);
  return verify_lane<double>(c, opts);
}

}  // namespace ict
