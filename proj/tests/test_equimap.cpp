#include <doctest.h>

#include <cmath>

#include "ict/equimap.hpp"
#include "ict/oracle.hpp"
#include "ict/specparse.hpp"

using namespace ict;
using cd = std::complex<double>;

namespace {
Weight W(int l) { return Weight::integer(l); }

template <typename S>
Mat<S> random_mat(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Mat<S> m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) {
      if constexpr (std::is_same_v<S, double>) m(i, j) = gauss(rng);
      else m(i, j) = cd(gauss(rng), gauss(rng));
    }
  return m;
}
}  // namespace

TEST_SUITE("equimap") {

TEST_CASE("end basis counts match the dimension formula") {
  CHECK(end_basis<double>(1).size() == 1);
  CHECK(end_basis<double>(2).size() == 3);
  CHECK(end_basis<double>(3).size() == 15);
  CHECK(end_basis<double>(4).size() == end_dimension(4));
  CHECK(end_basis<double>(5).size() == 603);
  CHECK(end_basis<double>(6).size() == end_dimension(6));
}

TEST_CASE("hom basis count battery: 10 random small specs") {
  std::mt19937_64 rng(20240113);
  auto random_spec = [&] {
    while (true) {
      SpaceSpec s;
      s.group = Group::O3;
      const int terms = 1 + int(rng() % 2);
      for (int t = 0; t < terms; ++t) {
        Term term;
        const int k = 1 + int(rng() % 3);
        for (int f = 0; f < k; ++f)
          term.factors.push_back(Irrep{Weight::integer(int(rng() % 4)), -1});
        term.parity = (rng() % 2) ? 1 : -1;
        s.terms.push_back(term);
      }
      if (s.dim() <= 200) return s;
    }
  };
  for (int trial = 0; trial < 10; ++trial) {
    const SpaceSpec vin = random_spec(), vout = random_spec();
    CHECK(hom_basis<double>(vin, vout).size() == hom_dimension(vin, vout));
  }
}

TEST_CASE("rank 1 End basis is the identity up to scale") {
  const auto basis = end_basis<double>(1);
  REQUIRE(basis.size() == 1);
  const MatD d = basis[0].dense(cartesian_space(1), cartesian_space(1));
  CHECK((d - d(0, 0) * MatD::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(d.norm() - 1.0) < 1e-12);
}

TEST_CASE("diagonal end-basis elements reproduce the projectors exactly") {
  const int n = 3;
  BasisOptions raw;
  raw.frobenius_normalized = false;
  const auto basis = end_basis<double>(n, Group::O3, raw);
  DecomposeOptions opts;
  opts.materialize = true;
  const auto projs = decompose<double>(cartesian_space(n), opts);
  std::size_t matched = 0;
  for (const auto& e : basis) {
    if (!(e.out_path == e.in_path)) continue;
    for (const auto& p : projs)
      if (p.path == e.out_path) {
        CHECK((e.block() - *p.dense).cwiseAbs().maxCoeff() == 0.0);  // same construction, same bits
        ++matched;
      }
  }
  CHECK(matched == projs.size());
}

TEST_CASE("worked example: 21 elements, weights 0 and 7 omitted") {
  const SpaceSpec vin = parse_space_spec("(2x2x2)-+(1x3)-", Group::O3);
  const SpaceSpec vout = parse_space_spec("(3x4)-", Group::O3);
  const auto basis = hom_basis<double>(vin, vout);
  CHECK(basis.size() == 21);
  for (const auto& e : basis) {
    CHECK(e.weight() != W(0));
    CHECK(e.weight() != W(7));
    CHECK(e.out_path.terminal() == e.in_path.terminal());
    CHECK(e.out_path.terminal_parity == e.in_path.terminal_parity);
  }
}

TEST_CASE("parity barrier gives an empty basis") {
  CHECK(hom_basis<double>(cartesian_space(2), cartesian_space(3)).empty());
}

TEST_CASE("bias basis: scalar input pairs with +1-parity weight-0 output paths") {
  const SpaceSpec scalar = parse_space_spec("(0)+", Group::O3);
  const SpaceSpec vout = parse_space_spec("(1x1)+", Group::O3);
  const auto basis = hom_basis<double>(scalar, vout);
  REQUIRE(basis.size() == 1);
  CHECK(basis[0].weight() == W(0));
  // against a -1-parity output term there is no bias element
  CHECK(hom_basis<double>(scalar, parse_space_spec("(1x1)-", Group::O3)).empty());
}

TEST_CASE("Frobenius orthonormality, dense, rank <= 3 End plus the worked example") {
  auto check_basis = [](const std::vector<BasisElement<double>>& basis, const SpaceSpec& vin,
                        const SpaceSpec& vout) {
    std::vector<MatD> dense;
    for (const auto& e : basis) dense.push_back(e.dense(vin, vout));
    for (std::size_t i = 0; i < dense.size(); ++i) {
      CHECK(std::abs(dense[i].norm() - 1.0) < 1e-10);
      for (std::size_t j = i + 1; j < dense.size(); ++j)
        CHECK(std::abs(dense[i].cwiseProduct(dense[j]).sum()) < 1e-10);
    }
  };
  for (int n = 1; n <= 3; ++n)
    check_basis(end_basis<double>(n), cartesian_space(n), cartesian_space(n));
  const SpaceSpec vin = parse_space_spec("(2x2x2)-+(1x3)-", Group::O3);
  const SpaceSpec vout = parse_space_spec("(3x4)-", Group::O3);
  check_basis(hom_basis<double>(vin, vout), vin, vout);
}

TEST_CASE("factored inner products match dense inner products") {
  const SpaceSpec vin = parse_space_spec("(1x1)++(2)+", Group::O3);
  const SpaceSpec vout = parse_space_spec("(2x1)-+(1x1)+", Group::O3);
  const auto basis = hom_basis<double>(vin, vout);
  REQUIRE(!basis.empty());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const double fast = frobenius_inner(basis[i], basis[j]);
      const double dense =
          basis[i].dense(vin, vout).cwiseProduct(basis[j].dense(vin, vout)).sum();
      CHECK(fast == doctest::Approx(dense).epsilon(1e-10));
    }
}

TEST_CASE("Frobenius norm of unnormalized elements is sqrt(2l+1)") {
  BasisOptions opts;
  opts.frobenius_normalized = false;
  const auto basis = end_basis<double>(3, Group::O3, opts);
  for (const auto& e : basis) {
    const double n2 = e.block().squaredNorm();
    CHECK(n2 == doctest::Approx(double(e.weight().dim())).epsilon(1e-9));
  }
}

TEST_CASE("matrix rank of dense elements is 2l+1 (rank <= 3)") {
  const auto basis = end_basis<double>(3);
  const SpaceSpec spec = cartesian_space(3);
  for (const auto& e : basis) {
    Eigen::JacobiSVD<MatD> svd(e.dense(spec, spec));
    const double tol = 1e-8 * svd.singularValues()(0);
    const int rank = (svd.singularValues().array() > tol).count();
    CHECK(rank == e.weight().dim());
  }
}

TEST_CASE("stable-rank proxy tr(G)^2 / tr(G^2) equals 2l+1 at rank 4") {
  // G = B^T B has 2l+1 equal nonzero eigenvalues, so the proxy is exact
  const auto basis = end_basis<double>(4);
  for (const auto& e : basis) {
    const MatD g = e.block().transpose() * e.block();
    const double proxy = (g.trace() * g.trace()) / (g * g).trace();
    CHECK(proxy == doctest::Approx(double(e.weight().dim())).epsilon(1e-9));
  }
}

TEST_CASE("element ordering is deterministic and sorted") {
  const SpaceSpec vin = parse_space_spec("(2x2x2)-+(1x3)-", Group::O3);
  const SpaceSpec vout = parse_space_spec("(3x4)-", Group::O3);
  const auto basis = hom_basis<double>(vin, vout);
  for (std::size_t i = 1; i < basis.size(); ++i) {
    const auto key = [](const BasisElement<double>& e) {
      return std::tuple(e.weight().doubled(), e.parity(), e.out_path.term_index, e.out_q,
                        e.in_path.term_index, e.in_q);
    };
    CHECK(key(basis[i - 1]) < key(basis[i]));
  }
}

TEST_CASE("factored_map: worked-example mix shapes sum to 21 coefficients") {
  const SpaceSpec vin = parse_space_spec("(2x2x2)-+(1x3)-", Group::O3);
  const SpaceSpec vout = parse_space_spec("(3x4)-", Group::O3);
  const auto fmap = factored_map<double>(vin, vout);
  CHECK(fmap.coefficient_count() == 21);
  const std::map<int, std::pair<int, int>> expect{{1, {1, 3}}, {2, {1, 6}}, {3, {1, 5}},
                                                  {4, {1, 4}}, {5, {1, 2}}, {6, {1, 1}}};
  REQUIRE(fmap.blocks.size() == expect.size());
  for (const auto& b : fmap.blocks) {
    const auto [rows, cols] = expect.at(b.l.as_int());
    CHECK(b.mix.rows() == rows);
    CHECK(b.mix.cols() == cols);
    CHECK(b.mix.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("factored_map: End of rank 2 has three 1x1 blocks; disjoint spaces give none") {
  const auto fmap = factored_map<double>(cartesian_space(2), cartesian_space(2));
  CHECK(fmap.blocks.size() == 3);
  CHECK(fmap.coefficient_count() == 3);
  const auto empty = factored_map<double>(parse_space_spec("(1)-", Group::O3),
                                          parse_space_spec("(2)-", Group::O3));
  CHECK(empty.blocks.empty());
  CHECK(empty.coefficient_count() == 0);
}

TEST_CASE("apply_map: zero mix, identity mix, dense agreement, equivariance") {
  std::mt19937_64 rng(51);
  const SpaceSpec vin = parse_space_spec("(2x2x2)-+(1x3)-", Group::O3);
  const SpaceSpec vout = parse_space_spec("(3x4)-", Group::O3);
  auto fmap = factored_map<double>(vin, vout);
  const VecD v = random_mat<double>(vin.dim(), 1, rng);
  CHECK(apply_map(fmap, v).norm() == 0.0);

  // identity mix on End(V) reproduces the input (partition of identity)
  auto id_map = factored_map<double>(vin, vin);
  for (auto& b : id_map.blocks) b.mix.setIdentity();
  CHECK((apply_map(id_map, v) - v).cwiseAbs().maxCoeff() < 1e-10 * v.norm());

  // random mix agrees with a dense map assembled from the stacks directly
  for (auto& b : fmap.blocks) b.mix = random_mat<double>(b.mix.rows(), b.mix.cols(), rng);
  MatD dense = MatD::Zero(vout.dim(), vin.dim());
  for (const auto& b : fmap.blocks)
    for (std::size_t r = 0; r < b.out_stack.size(); ++r)
      for (std::size_t q = 0; q < b.in_stack.size(); ++q)
        dense.block(vout.term_offset(b.out_terms[r]), vin.term_offset(b.in_terms[q]),
                    b.out_stack[r]->rows(), b.in_stack[q]->rows()) +=
            b.mix(r, q) * (*b.out_stack[r] * b.in_stack[q]->transpose());
  const VecD lhs = apply_map(fmap, v);
  const VecD rhs = dense * v;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10 * v.norm());

  // equivariance of the induced map
  for (int s = 0; s < 5; ++s) {
    const GroupElement g = random_o3_element(rng, s % 2 == 1);
    const VecD a = apply_map(fmap, rep_apply<double>(vin, g, v));
    const VecD b = rep_apply<double>(vout, g, apply_map(fmap, v));
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9 * v.norm());
  }

  CHECK_THROWS_AS(apply_map(fmap, VecD(VecD::Zero(3))), std::invalid_argument);
}

TEST_CASE("project_to_equivariant: identity, residual orthogonality, idempotence") {
  std::mt19937_64 rng(53);
  const SpaceSpec spec = cartesian_space(2);
  const auto basis = end_basis<double>(2);

  const MatD eye = MatD::Identity(9, 9);
  const auto [ci, proj_eye] = project_to_equivariant<double>(eye, basis, spec, spec);
  CHECK((proj_eye - eye).cwiseAbs().maxCoeff() < 1e-9);

  const MatD m = random_mat<double>(9, 9, rng);
  const auto [c, proj] = project_to_equivariant<double>(m, basis, spec, spec);
  const MatD resid = m - proj;
  for (const auto& e : basis)
    CHECK(std::abs(resid.cwiseProduct(e.dense(spec, spec)).sum()) < 1e-9);
  const auto [c2, proj2] = project_to_equivariant<double>(proj, basis, spec, spec);
  CHECK((proj2 - proj).cwiseAbs().maxCoeff() < 1e-9 * (1.0 + proj.cwiseAbs().maxCoeff()));

  // unnormalized basis is rejected
  BasisOptions unnorm;
  unnorm.frobenius_normalized = false;
  const auto raw = end_basis<double>(2, Group::O3, unnorm);
  CHECK_THROWS_AS(project_to_equivariant<double>(m, raw, spec, spec), std::invalid_argument);
}

TEST_CASE("projecting an oracle-built commutant matrix is the identity") {
  const SpaceSpec spec = cartesian_space(2);
  const auto basis = end_basis<double>(2);
  const auto oracle = commutant_nullspace<double>(spec, spec);
  REQUIRE(oracle.report.dimension == 3);
  std::mt19937_64 rng(55);
  VecD mix = random_mat<double>(3, 1, rng);
  VecD v = oracle.vectors * mix;
  Eigen::Map<const MatD> m(v.data(), 9, 9);
  const auto [c, proj] = project_to_equivariant<double>(MatD(m), basis, spec, spec);
  CHECK((proj - m).norm() < 1e-8 * m.norm());
}

TEST_CASE("SU2 hom basis between tensor-product spaces") {
  const SpaceSpec vin = parse_space_spec("(1/2x1/2x3/2)", Group::SU2);
  const SpaceSpec vout = parse_space_spec("(1/2x1/2x1/2)", Group::SU2);
  const auto basis = hom_basis<cd>(vin, vout);
  CHECK(basis.size() == hom_dimension(vin, vout));
  std::mt19937_64 rng(57);
  for (const auto& e : basis) {
    const MatC d = e.dense(vin, vout);
    CHECK(std::abs(d.norm() - 1.0) < 1e-10);
    for (int s = 0; s < 3; ++s) {
      const SU2Element g = random_su2(rng);
      const MatC lhs = rep_matrix<cd>(vout, g) * d;
      const MatC rhs = d * rep_matrix<cd>(vin, g);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

}  // TEST_SUITE
