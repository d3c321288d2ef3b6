#include "ict/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <map>

namespace ict {

namespace {

using cd = std::complex<double>;

constexpr double kKeepRatio = 1e-8;   // sigma < 1e-8 * sigma_max is "zero"
constexpr double kMinGap = 1e4;       // required kept/discarded separation

template <typename Scalar>
struct SchurBlocks {
  Mat<Scalar> q;                      // orthogonal/unitary basis
  std::vector<Eigen::Index> offset;   // block start
  std::vector<Eigen::Index> size;     // 1 or 2
  std::vector<Mat<Scalar>> block;     // diagonal blocks of T
};

// Real Schur of an orthogonal matrix: T is quasi-triangular with exact zeros
// at split positions, so the 1x1/2x2 partition can be read off directly.
SchurBlocks<double> schur_blocks(const MatD& rho) {
  Eigen::RealSchur<MatD> schur(rho);
  SchurBlocks<double> out;
  out.q = schur.matrixU();
  const MatD& t = schur.matrixT();
  Eigen::Index k = 0;
  while (k < t.rows()) {
    const Eigen::Index sz = (k + 1 < t.rows() && t(k + 1, k) != 0.0) ? 2 : 1;
    out.offset.push_back(k);
    out.size.push_back(sz);
    out.block.push_back(t.block(k, k, sz, sz));
    k += sz;
  }
  return out;
}

SchurBlocks<cd> schur_blocks(const MatC& rho) {
  Eigen::ComplexSchur<MatC> schur(rho);
  SchurBlocks<cd> out;
  out.q = schur.matrixU();
  const MatC& t = schur.matrixT();
  for (Eigen::Index k = 0; k < t.rows(); ++k) {
    out.offset.push_back(k);
    out.size.push_back(1);
    out.block.push_back(t.block(k, k, 1, 1));
  }
  return out;
}

// Orthonormal Frobenius basis of { X : B_out X = X B_in } for two small
// diagonal blocks, via the SVD of the <=4 x <=4 Sylvester operator.
template <typename Scalar>
std::vector<Mat<Scalar>> block_pair_nullspace(const Mat<Scalar>& b_out, const Mat<Scalar>& b_in) {
  const Eigen::Index a = b_out.rows(), b = b_in.rows();
  Mat<Scalar> op = Mat<Scalar>::Zero(a * b, a * b);
  // column-major vec: vec(B_out X) = (I (x) B_out) vec, vec(X B_in) = (B_in^T (x) I) vec
  for (Eigen::Index j = 0; j < b; ++j) op.block(j * a, j * a, a, a) += b_out;
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index j2 = 0; j2 < b; ++j2)
      op.block(j * a, j2 * a, a, a) -= b_in(j2, j) * Mat<Scalar>::Identity(a, a);
  Eigen::JacobiSVD<Mat<Scalar>> svd(op, Eigen::ComputeFullV);
  std::vector<Mat<Scalar>> out;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) < 1e-7) {  // blocks are orthogonal, ||op|| <= 2
      Mat<Scalar> x(a, b);
      for (Eigen::Index j = 0; j < b; ++j) x.col(j) = svd.matrixV().col(k).segment(j * a, a);
      out.push_back(std::move(x));
    }
  }
  return out;
}

template <typename Scalar>
std::vector<typename detail::Lane<Scalar>::Element> oracle_samples(Group group, int n,
                                                                   std::uint64_t seed);

template <>
std::vector<GroupElement> oracle_samples<double>(Group group, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GroupElement> out;
  out.push_back(random_rotation(rng));  // the Schur stage wants a pure rotation
  for (int i = 1; i < n; ++i)
    out.push_back(random_o3_element(rng, group == Group::O3 && i % 2 == 0));
  return out;
}

template <>
std::vector<SU2Element> oracle_samples<cd>(Group group, int n, std::uint64_t seed) {
  if (group != Group::SU2) throw std::invalid_argument("oracle: complex lane requires SU2");
  std::mt19937_64 rng(seed);
  std::vector<SU2Element> out;
  for (int i = 0; i < n; ++i) out.push_back(random_su2(rng));
  return out;
}

}  // namespace

template <typename Scalar>
CommutantBasis<Scalar> commutant_nullspace(const SpaceSpec& vin, const SpaceSpec& vout,
                                           int n_samples, std::uint64_t seed, Eigen::Index cap) {
  if (vin.group != vout.group) throw std::invalid_argument("commutant_nullspace: group mismatch");
  vin.validate();
  vout.validate();
  const Eigen::Index d_in = vin.dim(), d_out = vout.dim();
  if (d_in * d_out > cap)
    throw std::length_error("commutant_nullspace: dim(vin)*dim(vout) = " +
                            std::to_string(d_in * d_out) + " exceeds cap " + std::to_string(cap));
  if (n_samples < 8) throw std::invalid_argument("commutant_nullspace: need at least 8 samples");

  const auto elements = oracle_samples<Scalar>(vin.group, n_samples, seed);
  std::vector<Mat<Scalar>> rho_in, rho_out;
  rho_in.reserve(elements.size());
  rho_out.reserve(elements.size());
  for (const auto& g : elements) {
    rho_in.push_back(rep_matrix<Scalar>(vin, g));
    rho_out.push_back(rep_matrix<Scalar>(vout, g));
  }

  CommutantBasis<Scalar> result;
  result.report.spectrum_gap = std::numeric_limits<double>::infinity();

  // Stage 1: exact nullspace of the first constraint from Schur blocks.
  const auto so = schur_blocks(rho_out[0]);
  const auto si = schur_blocks(rho_in[0]);
  std::vector<Mat<Scalar>> candidates;  // d_out x d_in matrices, orthonormal in Frobenius
  for (std::size_t bo = 0; bo < so.block.size(); ++bo)
    for (std::size_t bi = 0; bi < si.block.size(); ++bi) {
      for (const auto& x : block_pair_nullspace<Scalar>(so.block[bo], si.block[bi])) {
        Mat<Scalar> m = so.q.middleCols(so.offset[bo], so.size[bo]) * x *
                        si.q.middleCols(si.offset[bi], si.size[bi]).adjoint();
        candidates.push_back(std::move(m));
      }
    }

  Mat<Scalar> basis(d_out * d_in, static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t k = 0; k < candidates.size(); ++k)
    basis.col(static_cast<Eigen::Index>(k)) =
        Eigen::Map<const Vec<Scalar>>(candidates[k].data(), d_out * d_in);

  // Stages 2..S: stack each remaining constraint in the current basis and
  // keep the SVD directions below the relative threshold.
  for (std::size_t s = 1; s < elements.size() && basis.cols() > 0; ++s) {
    Mat<Scalar> constrained(d_out * d_in, basis.cols());
    for (Eigen::Index c = 0; c < basis.cols(); ++c) {
      Eigen::Map<const Mat<Scalar>> m(basis.col(c).data(), d_out, d_in);
      Mat<Scalar> lm = rho_out[s] * m - m * rho_in[s];
      constrained.col(c) = Eigen::Map<const Vec<Scalar>>(lm.data(), d_out * d_in);
    }
    Eigen::BDCSVD<Mat<Scalar>> svd(constrained, Eigen::ComputeFullV);
    const VecD& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    if (smax < 1e-12) continue;  // constraint already satisfied by the whole basis
    const double cut = kKeepRatio * smax;
    Eigen::Index keep_from = 0;
    while (keep_from < sv.size() && sv(keep_from) >= cut) ++keep_from;
    const Eigen::Index kept = sv.size() - keep_from;
    if (kept > 0) {
      const double gap = sv(keep_from - 1) / std::max(sv(keep_from), 1e-300);
      result.report.spectrum_gap = std::min(result.report.spectrum_gap, gap);
      if (gap < kMinGap)
        throw std::runtime_error(
            "commutant_nullspace: singular spectrum gap " + std::to_string(gap) +
            " below 1e4; refusing to guess the nullity");
    }
    basis = basis * svd.matrixV().rightCols(kept);
  }

  // Residual certificates over every sample.
  result.report.dimension = basis.cols();
  result.report.residual_norms.reserve(basis.cols());
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    Eigen::Map<const Mat<Scalar>> m(basis.col(c).data(), d_out, d_in);
    double worst = 0;
    for (std::size_t s = 0; s < elements.size(); ++s)
      worst = std::max(worst, (rho_out[s] * m - m * rho_in[s]).norm());
    result.report.residual_norms.push_back(worst);
  }
  result.vectors = std::move(basis);
  return result;
}

std::array<MatD, 3> classical_rank2_projectors() {
  std::array<MatD, 3> h;
  for (auto& m : h) m = MatD::Zero(9, 9);
  auto idx = [](int i, int j) { return 3 * i + j; };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const double dij_dkl = (i == j && k == l) ? 1.0 : 0.0;
          const double dik_djl = (i == k && j == l) ? 1.0 : 0.0;
          const double dil_djk = (i == l && j == k) ? 1.0 : 0.0;
          h[0](idx(i, j), idx(k, l)) = dij_dkl / 3.0;
          h[1](idx(i, j), idx(k, l)) = 0.5 * (dik_djl - dil_djk);
          h[2](idx(i, j), idx(k, l)) = 0.5 * (dik_djl + dil_djk) - dij_dkl / 3.0;
        }
  return h;
}

std::uint64_t path_count_recursive(int n, Weight l, Group group) {
  if (n < 1) throw std::invalid_argument("path_count_recursive: n must be >= 1");
  const int bridge = (group == Group::SU2) ? 1 : 2;  // doubled bridge weight
  std::map<int, std::uint64_t> counts{{bridge, 1}};
  for (int step = 2; step <= n; ++step) {
    std::map<int, std::uint64_t> next;
    for (const auto& [ld, c] : counts) {
      for (int d = std::abs(ld - bridge); d <= ld + bridge; d += 2) next[d] += c;
    }
    counts = std::move(next);
  }
  auto it = counts.find(l.doubled());
  return it == counts.end() ? 0 : it->second;
}

template <typename Scalar>
std::vector<double> principal_angles(const Mat<Scalar>& a, const Mat<Scalar>& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("principal_angles: row mismatch");
  const Mat<Scalar> g = a.adjoint() * b;
  Eigen::BDCSVD<Mat<Scalar>> svd(g);
  // acos loses small angles (cos theta rounds to 1); the sine route
  // sigma(B - A A^H B) resolves them, so pick per angle (Bjorck-Golub).
  const Mat<Scalar> s = b - a * g;
  Eigen::BDCSVD<Mat<Scalar>> svd_sin(s);
  const Eigen::Index n = svd.singularValues().size();
  const Eigen::Index ns = svd_sin.singularValues().size();
  std::vector<double> angles;
  angles.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = std::min(1.0, std::max(-1.0, svd.singularValues()(i)));
    // k-th largest cosine pairs with the k-th smallest sine
    const Eigen::Index j = ns - 1 - i;
    if (c > M_SQRT1_2 && j >= 0) {
      const double sn = std::min(1.0, std::max(0.0, svd_sin.singularValues()(j)));
      angles.push_back(std::asin(sn));
    } else {
      angles.push_back(std::acos(c));
    }
  }
  return angles;  // ascending
}

template CommutantBasis<double> commutant_nullspace<double>(const SpaceSpec&, const SpaceSpec&, int,
                                                            std::uint64_t, Eigen::Index);
template CommutantBasis<cd> commutant_nullspace<cd>(const SpaceSpec&, const SpaceSpec&, int,
                                                    std::uint64_t, Eigen::Index);
template std::vector<double> principal_angles(const MatD&, const MatD&);
template std::vector<double> principal_angles(const MatC&, const MatC&);

}  // namespace ict
