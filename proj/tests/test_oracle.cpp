#include <doctest.h>

#include <gmpxx.h>

#include <cmath>

#include "ict/equimap.hpp"
#include "ict/oracle.hpp"
#include "ict/specparse.hpp"

using namespace ict;
using cd = std::complex<double>;

TEST_SUITE("oracle") {

TEST_CASE("classical rank-2 projectors: exact algebraic identities") {
  const auto h = classical_rank2_projectors();
  MatD sum = h[0] + h[1] + h[2];
  CHECK((sum - MatD::Identity(9, 9)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(h[0].trace() == doctest::Approx(1.0));
  CHECK(h[1].trace() == doctest::Approx(3.0));
  CHECK(h[2].trace() == doctest::Approx(5.0));

  // idempotence holds exactly in rational arithmetic (entries are 0, 1/2, 1/3, ...)
  for (const auto& m : h) {
    std::vector<std::vector<mpq_class>> q(9, std::vector<mpq_class>(9));
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) {
        // reconstruct the rational value from sixths: entries are k/6 exactly
        const long k = std::lround(m(i, j) * 6.0);
        q[i][j] = mpq_class(k, 6);
        q[i][j].canonicalize();
        CHECK(std::abs(m(i, j) - q[i][j].get_d()) < 1e-15);
      }
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) {
        mpq_class acc(0);
        for (int k = 0; k < 9; ++k) acc += q[i][k] * q[k][j];
        CHECK(acc == q[i][j]);
      }
  }
}

TEST_CASE("path count recursion basics") {
  CHECK(path_count_recursive(3, Weight::integer(2)) == 2);
  for (int n = 1; n <= 9; ++n) CHECK(path_count_recursive(n, Weight::integer(n)) == 1);
  CHECK(path_count_recursive(4, Weight::integer(0), Group::SU2) == 2);
  CHECK(path_count_recursive(4, Weight::from_doubled(2), Group::SU2) == 3);
  CHECK(path_count_recursive(4, Weight::from_doubled(4), Group::SU2) == 1);
}

TEST_CASE("End of Cartesian rank 2: nullity 3") {
  const SpaceSpec spec = cartesian_space(2);
  const auto res = commutant_nullspace<double>(spec, spec);
  CHECK(res.report.dimension == 3);
  CHECK(res.report.spectrum_gap > 1e4);
  for (double r : res.report.residual_norms) CHECK(r < 1e-10);
  // orthonormal columns
  const MatD gram = res.vectors.transpose() * res.vectors;
  CHECK((gram - MatD::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Schur: no map between inequivalent irreps") {
  const SpaceSpec v1 = parse_space_spec("(1)-", Group::O3);
  const SpaceSpec v2 = parse_space_spec("(2)-", Group::O3);
  const auto res = commutant_nullspace<double>(v1, v2);
  CHECK(res.report.dimension == 0);
}

TEST_CASE("parity barrier confirmed numerically on rank 2 -> rank 3") {
  const auto res = commutant_nullspace<double>(cartesian_space(2), cartesian_space(3));
  CHECK(res.report.dimension == 0);
}

TEST_CASE("nullity invariant under reseeding") {
  const SpaceSpec vin = parse_space_spec("(1x1)++(2)+", Group::O3);
  const SpaceSpec vout = parse_space_spec("(2x1)-+(1x1)+", Group::O3);
  const auto a = commutant_nullspace<double>(vin, vout, 8, 1);
  const auto b = commutant_nullspace<double>(vin, vout, 8, 987654321);
  const auto c = commutant_nullspace<double>(vin, vout, 12, 555);
  CHECK(a.report.dimension == b.report.dimension);
  CHECK(a.report.dimension == c.report.dimension);
  CHECK(a.report.dimension == static_cast<Eigen::Index>(hom_dimension(vin, vout)));
}

TEST_CASE("span equivalence with the constructed basis on small specs") {
  const std::vector<std::pair<std::string, std::string>> cases{
      {"(1x1)-", "(1x1)-"},
      {"(2x1)-", "(1x1x1)-"},
      {"(1x1)++(0)+", "(2)++(0)+"},
  };
  for (const auto& [tin, tout] : cases) {
    const SpaceSpec vin = parse_space_spec(tin, Group::O3);
    const SpaceSpec vout = parse_space_spec(tout, Group::O3);
    const auto oracle = commutant_nullspace<double>(vin, vout);
    const auto basis = hom_basis<double>(vin, vout);
    REQUIRE(oracle.report.dimension == static_cast<Eigen::Index>(basis.size()));
    if (basis.empty()) continue;
    MatD ours(vin.dim() * vout.dim(), basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const MatD d = basis[i].dense(vin, vout);
      ours.col(i) = Eigen::Map<const VecD>(d.data(), d.size());
    }
    const auto angles = principal_angles<double>(oracle.vectors, ours);
    CHECK(angles.back() < 1e-7);
  }
}

TEST_CASE("SU2 oracle matches the SU2 basis") {
  const SpaceSpec vin = parse_space_spec("(1/2x1/2)", Group::SU2);
  const SpaceSpec vout = parse_space_spec("(1/2x1/2)", Group::SU2);
  const auto oracle = commutant_nullspace<cd>(vin, vout);
  CHECK(oracle.report.dimension == 2);  // weights 0 and 1, one path each
  const auto basis = hom_basis<cd>(vin, vout);
  MatC ours(16, basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const MatC d = basis[i].dense(vin, vout);
    ours.col(i) = Eigen::Map<const VecC>(d.data(), d.size());
  }
  const auto angles = principal_angles<cd>(oracle.vectors, ours);
  CHECK(angles.back() < 1e-7);
}

TEST_CASE("cap and sample preconditions") {
  CHECK_THROWS_AS(commutant_nullspace<double>(cartesian_space(4), cartesian_space(4), 8, 1, 100),
                  std::length_error);
  CHECK_THROWS_AS(commutant_nullspace<double>(cartesian_space(2), cartesian_space(2), 4),
                  std::invalid_argument);
}

}  // TEST_SUITE
