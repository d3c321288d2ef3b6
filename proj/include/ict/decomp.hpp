#pragma once

#include <optional>
#include <set>

#include "ict/pathmat.hpp"
#include "ict/scheme.hpp"

namespace ict {

/// One factored decomposition matrix H = phat * phat^H for a single path.
/// The dense form is materialized only on request.
template <typename Scalar>
struct Projector {
  Path path;
  int q = 1;  // 1-based index within the terminal (l, parity) group
  Mat<Scalar> phat;
  std::optional<Mat<Scalar>> dense;
  BasisKind basis = BasisKind::Spherical;

  Weight weight() const { return path.terminal(); }
  int parity() const { return path.terminal_parity; }
  Mat<Scalar> densified() const { return dense ? *dense : Mat<Scalar>(phat * phat.adjoint()); }
};

struct DecomposeOptions {
  std::optional<std::set<int>> weight_filter_doubled;  // keep only these terminal weights
  bool materialize = false;
  BasisKind basis = BasisKind::Spherical;
  int threads = -1;
};

/// All projectors of every term of the spec, in scheme path order. The
/// parentage walk always expands every intermediate weight; the filter only
/// selects terminal weights.
template <typename Scalar>
std::vector<Projector<Scalar>> decompose(const SpaceSpec& spec, const DecomposeOptions& opts = {});

/// Builds the path matrices of one term by a level walk that shares parents
/// between children; order and bits match build_path_matrix per path.
template <typename Scalar>
std::vector<PathMatrix<Scalar>> build_term_path_matrices(const Term& term, int term_index,
                                                         int threads = -1);

/// phat (phat^H v) without materializing H.
template <typename Scalar>
Vec<Scalar> apply_projection(const Projector<Scalar>& proj, const Vec<Scalar>& v);

struct VerifyTolerances {
  double partition = 1e-10;
  double annihilation = 1e-10;
  double idempotence = 1e-9;
  double trace = 1e-8;
  double equivariance = 1e-9;
};

struct VerifyReport {
  bool partition_applicable = true;  // false when a weight filter left gaps
  double partition_residual = 0;     // || sum H - I ||_max
  double annihilation_residual = 0;  // max_{i != j} || H_i H_j ||_max
  double idempotence_residual = 0;   // max || H^2 - H ||_max
  double symmetry_residual = 0;      // max || H - H^H ||_max
  double trace_residual = 0;         // max | tr H - (2l+1) |
  double equivariance_residual = 0;  // max || H rho(g) - rho(g) H ||_max
  int samples_used = 0;
  bool dense_checks = true;  // false when dims forced matrix-free spot checks

  bool pass(const VerifyTolerances& tol = {}) const {
    return (!partition_applicable || partition_residual < tol.partition) &&
           annihilation_residual < tol.annihilation && idempotence_residual < tol.idempotence &&
           trace_residual < tol.trace && equivariance_residual < tol.equivariance;
  }
};

/// Residual report for a projector set of one spec (Definition-style checks:
/// partition of identity, mutual annihilation, idempotence, trace,
/// equivariance over `samples` random group elements). Dense checks run when
/// every term dimension is at most `dense_dim_cap` (default: through rank 6);
/// larger spaces fall back to seeded matrix-free spot checks.
template <typename Scalar>
VerifyReport verify_decomposition(const SpaceSpec& spec, const std::vector<Projector<Scalar>>& projs,
                                  int samples = 20, std::uint64_t seed = 7,
                                  Eigen::Index dense_dim_cap = 729, int threads = -1);

}  // namespace ict
