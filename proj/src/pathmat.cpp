#include "ict/pathmat.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>

namespace ict {

namespace {

using cd = std::complex<double>;

double max_abs(const MatD& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void check_path_against_term(const Path& path, const Term& term) {
  if (term.factors.empty()) throw std::invalid_argument("build_path_matrix: empty term");
  if (path.start != term.factors[0].l)
    throw std::invalid_argument("build_path_matrix: path start does not match first factor");
  if (path.steps.size() + 1 != term.factors.size())
    throw std::invalid_argument("build_path_matrix: path length does not match factor count");
  Weight prev = path.start;
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    if (path.steps[i].bridge != term.factors[i + 1].l)
      throw std::invalid_argument("build_path_matrix: bridge does not match factor weight");
    if (!triangle_ok(prev, path.steps[i].bridge, path.steps[i].result))
      throw std::invalid_argument("build_path_matrix: step violates the triangle rule");
    prev = path.steps[i].result;
  }
}

}  // namespace

GroupElement group_element_from_orthogonal(const Eigen::Matrix3d& q) {
  const double resid = max_abs(q.transpose() * q - Eigen::Matrix3d::Identity());
  if (resid >= 1e-12)
    throw std::invalid_argument("GroupElement: matrix is not orthogonal (residual " +
                                std::to_string(resid) + ")");
  const double det = q.determinant();
  const int sigma = det < 0 ? -1 : 1;
  return {sigma * q, sigma};
}

SU2Element su2_element_from_unitary(const Eigen::Matrix2cd& u) {
  const double resid = (u.adjoint() * u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff();
  if (resid >= 1e-12) throw std::invalid_argument("SU2Element: matrix is not unitary");
  if (std::abs(u.determinant() - cd(1.0, 0.0)) >= 1e-12)
    throw std::invalid_argument("SU2Element: determinant is not 1");
  return {u};
}

GroupElement random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Matrix3d g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(g);
  Eigen::Matrix3d q = qr.householderQ();
  Eigen::Matrix3d r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < 3; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  if (q.determinant() < 0) q.col(2) = -q.col(2);
  return {q, 1};
}

GroupElement random_o3_element(std::mt19937_64& rng, bool with_inversion) {
  GroupElement g = random_rotation(rng);
  g.sigma = with_inversion ? -1 : 1;
  return g;
}

SU2Element random_su2(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double w = gauss(rng), x = gauss(rng), y = gauss(rng), z = gauss(rng);
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  w /= n; x /= n; y /= n; z /= n;
  Eigen::Matrix2cd u;
  u << cd(w, x), cd(y, z), cd(-y, z), cd(w, -x);
  return {u};
}

const Eigen::Matrix3d& cartesian_to_spherical_l1() {
  static const Eigen::Matrix3d b = [] {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    m(0, 1) = 1.0;  // m=-1 <- y
    m(1, 2) = 1.0;  // m= 0 <- z
    m(2, 0) = 1.0;  // m=+1 <- x
    return m;
  }();
  return b;
}

template <typename Scalar>
Mat<Scalar> contract_step(const Mat<Scalar>& prev, const CGTensor<Scalar>& cg) {
  if (prev.cols() != cg.d2())
    throw std::invalid_argument("contract_step: column count does not match CG middle index");
  const Eigen::Index rows = prev.rows();
  Mat<Scalar> next(cg.d1() * rows, cg.d3());
  for (int a = 0; a < cg.d1(); ++a) next.middleRows(a * rows, rows).noalias() = prev * cg.slice(a);
  return next;
}

template <typename Scalar>
PathMatrix<Scalar> build_path_matrix(const Path& path, const Term& term) {
  check_path_against_term(path, term);
  Mat<Scalar> m = Mat<Scalar>::Identity(path.start.dim(), path.start.dim());
  Weight prev = path.start;
  for (const auto& step : path.steps) {
    m = contract_step(m, *cg_cached<Scalar>(step.bridge, prev, step.result));
    prev = step.result;
  }
  // CG unitarity already leaves unit columns; renormalizing bounds the drift.
  VecD norms(m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) norms(c) = m.col(c).norm();
  if (norms.maxCoeff() - norms.minCoeff() > 1e-8)
    throw std::runtime_error("build_path_matrix: column norms diverge beyond 1e-8 for path " +
                             path.str());
  for (Eigen::Index c = 0; c < m.cols(); ++c) m.col(c) /= norms(c);
  return PathMatrix<Scalar>{path, std::move(m), BasisKind::Spherical, true};
}

template <typename Scalar>
Vec<Scalar> mode_apply(const std::vector<Eigen::Index>& dims, int mode, const Mat<Scalar>& m,
                       const Vec<Scalar>& x) {
  Eigen::Index stride = 1, outer = 1;
  for (int j = 0; j < mode; ++j) stride *= dims[j];
  for (std::size_t j = mode + 1; j < dims.size(); ++j) outer *= dims[j];
  const Eigen::Index d = dims[mode], nd = m.rows();
  if (m.cols() != d || x.size() != stride * d * outer)
    throw std::invalid_argument("mode_apply: shape mismatch");
  Vec<Scalar> y(stride * nd * outer);
  for (Eigen::Index o = 0; o < outer; ++o) {
    Eigen::Map<const Mat<Scalar>> xo(x.data() + o * stride * d, stride, d);
    Eigen::Map<Mat<Scalar>> yo(y.data() + o * stride * nd, stride, nd);
    yo.noalias() = xo * m.transpose();
  }
  return y;
}

template <typename Scalar>
Vec<Scalar> kron_apply(const std::vector<Mat<Scalar>>& factors, const Vec<Scalar>& x) {
  std::vector<Eigen::Index> dims(factors.size());
  for (std::size_t i = 0; i < factors.size(); ++i) dims[i] = factors[i].cols();
  Vec<Scalar> y = x;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    y = mode_apply(dims, static_cast<int>(i), factors[i], y);
    dims[i] = factors[i].rows();
  }
  return y;
}

namespace {

// Maximal classic path 0 -> 1 -> ... -> l over (l=1)^{x l}, and its SU2
// analogue over (1/2)^{x 2j}; both give a canonical terminal-l path matrix.
Term canonical_term_real(int l) {
  Term t;
  t.factors.assign(static_cast<std::size_t>(l), Irrep{Weight::integer(1), -1});
  t.parity = (l % 2 == 0) ? 1 : -1;
  return t;
}

Path canonical_path_real(int l) {
  Path p;
  p.start = Weight::integer(1);
  for (int k = 2; k <= l; ++k) p.steps.push_back({Weight::integer(1), Weight::integer(k)});
  p.terminal_parity = (l % 2 == 0) ? 1 : -1;
  return p;
}

Term canonical_term_su2(int jd) {
  Term t;
  t.factors.assign(static_cast<std::size_t>(jd), Irrep{Weight::from_doubled(1), 1});
  t.parity = 1;
  return t;
}

Path canonical_path_su2(int jd) {
  Path p;
  p.start = Weight::from_doubled(1);
  for (int k = 2; k <= jd; ++k) p.steps.push_back({Weight::from_doubled(1), Weight::from_doubled(k)});
  p.terminal_parity = 1;
  return p;
}

template <typename Scalar>
const Mat<Scalar>& canonical_path_matrix(Weight l);

template <>
const Mat<double>& canonical_path_matrix<double>(Weight l) {
  static std::map<int, std::shared_ptr<const MatD>> cache;
  static std::shared_mutex mtx;
  const int key = l.doubled();
  {
    std::shared_lock lock(mtx);
    if (auto it = cache.find(key); it != cache.end()) return *it->second;
  }
  const int li = l.as_int();
  auto value = std::make_shared<const MatD>(
      build_path_matrix<double>(canonical_path_real(li), canonical_term_real(li)).entries);
  std::unique_lock lock(mtx);
  return *cache.emplace(key, value).first->second;
}

template <>
const Mat<cd>& canonical_path_matrix<cd>(Weight j) {
  static std::map<int, std::shared_ptr<const MatC>> cache;
  static std::shared_mutex mtx;
  const int key = j.doubled();
  {
    std::shared_lock lock(mtx);
    if (auto it = cache.find(key); it != cache.end()) return *it->second;
  }
  auto value = std::make_shared<const MatC>(
      build_path_matrix<cd>(canonical_path_su2(key), canonical_term_su2(key)).entries);
  std::unique_lock lock(mtx);
  return *cache.emplace(key, value).first->second;
}

}  // namespace

MatD wigner_d(Weight l, const GroupElement& g, int parity) {
  if (!l.is_integer()) throw std::domain_error("wigner_d: half-integer weight requires SU2");
  const double chi = (g.sigma < 0) ? static_cast<double>(parity) : 1.0;
  if (l.doubled() == 0) return MatD::Constant(1, 1, chi);
  const Eigen::Matrix3d& b = cartesian_to_spherical_l1();
  const MatD a = b * g.rotation * b.transpose();
  if (l.doubled() == 2) return chi * a;
  const MatD& p = canonical_path_matrix<double>(l);
  const int n = l.as_int();
  std::vector<MatD> factors(static_cast<std::size_t>(n), a);
  MatD image(p.rows(), p.cols());
  for (Eigen::Index c = 0; c < p.cols(); ++c) image.col(c) = kron_apply(factors, VecD(p.col(c)));
  return chi * (p.transpose() * image);
}

MatC wigner_d(Weight j, const SU2Element& g, int /*parity*/) {
  if (j.doubled() == 0) return MatC::Identity(1, 1);
  if (j.doubled() == 1) return g.u;
  const MatC& p = canonical_path_matrix<cd>(j);
  std::vector<MatC> factors(static_cast<std::size_t>(j.doubled()), g.u);
  MatC image(p.rows(), p.cols());
  for (Eigen::Index c = 0; c < p.cols(); ++c) image.col(c) = kron_apply(factors, VecC(p.col(c)));
  return p.adjoint() * image;
}

MatD convert_rows_basis(const MatD& m, const Term& term, BasisKind from, BasisKind to) {
  if (from == to) return m;
  const Eigen::Matrix3d& b = cartesian_to_spherical_l1();
  const MatD op = (to == BasisKind::Cartesian) ? MatD(b.transpose()) : MatD(b);
  std::vector<Eigen::Index> dims;
  for (const auto& f : term.factors) dims.push_back(f.l.dim());
  MatD out(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    VecD v = m.col(c);
    for (std::size_t i = 0; i < term.factors.size(); ++i)
      if (term.factors[i].l.doubled() == 2) v = mode_apply(dims, static_cast<int>(i), op, v);
    out.col(c) = v;
  }
  return out;
}

namespace {

template <typename Scalar>
Mat<Scalar> kron(const Mat<Scalar>& a, const Mat<Scalar>& b) {
  Mat<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

template <typename Scalar>
Mat<Scalar> factor_matrix(const Irrep& f, const typename detail::Lane<Scalar>::Element& g,
                          BasisKind basis);

template <>
MatD factor_matrix<double>(const Irrep& f, const GroupElement& g, BasisKind basis) {
  if (basis == BasisKind::Cartesian && f.l.doubled() == 2) return g.rotation;
  return wigner_d(f.l, g, 1);  // rotation part only; term parity applied by the caller
}

template <>
MatC factor_matrix<cd>(const Irrep& f, const SU2Element& g, BasisKind /*basis*/) {
  return wigner_d(f.l, g);
}

template <typename Scalar>
Scalar term_chi(const Term& term, const typename detail::Lane<Scalar>::Element& g);

template <>
double term_chi<double>(const Term& term, const GroupElement& g) {
  return (g.sigma < 0) ? static_cast<double>(term.parity) : 1.0;
}
template <>
cd term_chi<cd>(const Term&, const SU2Element&) {
  return cd(1.0, 0.0);
}

}  // namespace

template <typename Scalar>
Mat<Scalar> term_rep_matrix(const Term& term, const typename detail::Lane<Scalar>::Element& g,
                            BasisKind basis) {
  Mat<Scalar> rep = Mat<Scalar>::Identity(1, 1);
  // last factor most significant
  for (auto it = term.factors.rbegin(); it != term.factors.rend(); ++it)
    rep = kron<Scalar>(rep, factor_matrix<Scalar>(*it, g, basis));
  return term_chi<Scalar>(term, g) * rep;
}

template <typename Scalar>
Mat<Scalar> rep_matrix(const SpaceSpec& spec, const typename detail::Lane<Scalar>::Element& g,
                       BasisKind basis) {
  spec.validate();
  const Eigen::Index d = spec.dim();
  Mat<Scalar> rep = Mat<Scalar>::Zero(d, d);
  Eigen::Index off = 0;
  for (const auto& term : spec.terms) {
    const Eigen::Index td = term.dim();
    rep.block(off, off, td, td) = term_rep_matrix<Scalar>(term, g, basis);
    off += td;
  }
  return rep;
}

template <typename Scalar>
Vec<Scalar> term_rep_apply(const Term& term, const typename detail::Lane<Scalar>::Element& g,
                           const Vec<Scalar>& v, BasisKind basis) {
  if (v.size() != term.dim()) throw std::invalid_argument("term_rep_apply: vector length mismatch");
  std::vector<Mat<Scalar>> factors;
  factors.reserve(term.factors.size());
  for (const auto& f : term.factors) factors.push_back(factor_matrix<Scalar>(f, g, basis));
  return term_chi<Scalar>(term, g) * kron_apply(factors, v);
}

template <typename Scalar>
Vec<Scalar> rep_apply(const SpaceSpec& spec, const typename detail::Lane<Scalar>::Element& g,
                      const Vec<Scalar>& v, BasisKind basis) {
  if (v.size() != spec.dim()) throw std::invalid_argument("rep_apply: vector length mismatch");
  Vec<Scalar> out(v.size());
  Eigen::Index off = 0;
  for (const auto& term : spec.terms) {
    const Eigen::Index td = term.dim();
    Vec<Scalar> slice = v.segment(off, td);
    out.segment(off, td) = term_rep_apply<Scalar>(term, g, slice, basis);
    off += td;
  }
  return out;
}

template Mat<double> contract_step(const Mat<double>&, const CGTensor<double>&);
template Mat<cd> contract_step(const Mat<cd>&, const CGTensor<cd>&);
template PathMatrix<double> build_path_matrix<double>(const Path&, const Term&);
template PathMatrix<cd> build_path_matrix<cd>(const Path&, const Term&);
template Vec<double> mode_apply(const std::vector<Eigen::Index>&, int, const Mat<double>&,
                                const Vec<double>&);
template Vec<cd> mode_apply(const std::vector<Eigen::Index>&, int, const Mat<cd>&, const Vec<cd>&);
template Vec<double> kron_apply(const std::vector<Mat<double>>&, const Vec<double>&);
template Vec<cd> kron_apply(const std::vector<Mat<cd>>&, const Vec<cd>&);
template Mat<double> term_rep_matrix<double>(const Term&, const GroupElement&, BasisKind);
template Mat<cd> term_rep_matrix<cd>(const Term&, const SU2Element&, BasisKind);
template Mat<double> rep_matrix<double>(const SpaceSpec&, const GroupElement&, BasisKind);
template Mat<cd> rep_matrix<cd>(const SpaceSpec&, const SU2Element&, BasisKind);
template Vec<double> term_rep_apply<double>(const Term&, const GroupElement&, const Vec<double>&,
                                            BasisKind);
template Vec<cd> term_rep_apply<cd>(const Term&, const SU2Element&, const Vec<cd>&, BasisKind);
template Vec<double> rep_apply<double>(const SpaceSpec&, const GroupElement&, const Vec<double>&,
                                       BasisKind);
template Vec<cd> rep_apply<cd>(const SpaceSpec&, const SU2Element&, const Vec<cd>&, BasisKind);

}  // namespace ict
