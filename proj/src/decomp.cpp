#include "ict/decomp.hpp"

#include <atomic>

#include "ict/parallel.hpp"

namespace ict {

namespace {
using cd = std::complex<double>;

template <typename Scalar>
double max_abs(const Mat<Scalar>& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}
}  // namespace

template <typename Scalar>
std::vector<PathMatrix<Scalar>> build_term_path_matrices(const Term& term, int term_index,
                                                         int threads) {
  struct Node {
    Path path;
    Mat<Scalar> mat;
  };
  std::vector<Node> level;
  {
    Path seed;
    seed.term_index = term_index;
    seed.start = term.factors[0].l;
    seed.terminal_parity = term.parity;
    level.push_back({seed, Mat<Scalar>::Identity(seed.start.dim(), seed.start.dim())});
  }
  for (std::size_t f = 1; f < term.factors.size(); ++f) {
    const Weight bridge = term.factors[f].l;
    // child list in lexicographic order: parents in order, results ascending
    struct Job {
      std::size_t parent;
      Weight result;
    };
    std::vector<Job> jobs;
    for (std::size_t p = 0; p < level.size(); ++p) {
      const Weight prev = level[p].path.terminal();
      const int lo = std::abs(prev.doubled() - bridge.doubled());
      const int hi = prev.doubled() + bridge.doubled();
      for (int d = lo; d <= hi; d += 2) jobs.push_back({p, Weight::from_doubled(d)});
    }
    std::vector<Node> next(jobs.size());
    parallel_for(
        jobs.size(),
        [&](std::size_t i) {
          const auto& job = jobs[i];
          const Node& parent = level[job.parent];
          Path path = parent.path;
          path.steps.push_back({bridge, job.result});
          const auto cg = cg_cached<Scalar>(bridge, parent.path.terminal(), job.result);
          next[i] = {std::move(path), contract_step(parent.mat, *cg)};
        },
        threads);
    level = std::move(next);
  }

  std::vector<PathMatrix<Scalar>> out;
  out.reserve(level.size());
  for (auto& node : level) {
    VecD norms(node.mat.cols());
    for (Eigen::Index c = 0; c < node.mat.cols(); ++c) norms(c) = node.mat.col(c).norm();
    if (norms.size() && norms.maxCoeff() - norms.minCoeff() > 1e-8)
      throw std::runtime_error("path matrix column norms diverge for " + node.path.str());
    for (Eigen::Index c = 0; c < node.mat.cols(); ++c) node.mat.col(c) /= norms(c);
    out.push_back({std::move(node.path), std::move(node.mat), BasisKind::Spherical, true});
  }
  return out;
}

template <typename Scalar>
std::vector<Projector<Scalar>> decompose(const SpaceSpec& spec, const DecomposeOptions& opts) {
  spec.validate();
  std::vector<Projector<Scalar>> out;
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    Term term = spec.terms[t];
    if (spec.group != Group::O3) term.parity = 1;
    auto mats = build_term_path_matrices<Scalar>(term, static_cast<int>(t), opts.threads);

    std::vector<Path> paths;
    paths.reserve(mats.size());
    for (const auto& m : mats) paths.push_back(m.path);
    const auto qs = path_q_indices(paths);

    for (std::size_t i = 0; i < mats.size(); ++i) {
      if (opts.weight_filter_doubled &&
          !opts.weight_filter_doubled->count(mats[i].path.terminal().doubled()))
        continue;
      Projector<Scalar> proj;
      proj.path = mats[i].path;
      proj.q = qs[i];
      proj.basis = opts.basis;
      if constexpr (std::is_same_v<Scalar, double>) {
        proj.phat = (opts.basis == BasisKind::Cartesian)
                        ? convert_rows_basis(mats[i].entries, term, BasisKind::Spherical,
                                             BasisKind::Cartesian)
                        : std::move(mats[i].entries);
      } else {
        if (opts.basis == BasisKind::Cartesian)
          throw std::invalid_argument("decompose: Cartesian basis is not defined for SU2");
        proj.phat = std::move(mats[i].entries);
      }
      if (opts.materialize) proj.dense = Mat<Scalar>(proj.phat * proj.phat.adjoint());
      out.push_back(std::move(proj));
    }
  }
  return out;
}

template <typename Scalar>
Vec<Scalar> apply_projection(const Projector<Scalar>& proj, const Vec<Scalar>& v) {
  if (v.size() != proj.phat.rows())
    throw std::invalid_argument("apply_projection: vector length mismatch");
  return proj.phat * (proj.phat.adjoint() * v);
}

namespace {

template <typename Scalar>
std::vector<typename detail::Lane<Scalar>::Element> sample_elements(Group group, int samples,
                                                                    std::uint64_t seed);

template <>
std::vector<GroupElement> sample_elements<double>(Group group, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GroupElement> out;
  out.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const bool invert = group == Group::O3 && (i % 2 == 1);  // half the O3 samples
    out.push_back(random_o3_element(rng, invert));
  }
  return out;
}

template <>
std::vector<SU2Element> sample_elements<cd>(Group group, int samples, std::uint64_t seed) {
  if (group != Group::SU2) throw std::invalid_argument("complex lane requires SU2");
  std::mt19937_64 rng(seed);
  std::vector<SU2Element> out;
  out.reserve(samples);
  for (int i = 0; i < samples; ++i) out.push_back(random_su2(rng));
  return out;
}

}  // namespace

template <typename Scalar>
VerifyReport verify_decomposition(const SpaceSpec& spec, const std::vector<Projector<Scalar>>& projs,
                                  int samples, std::uint64_t seed, Eigen::Index dense_dim_cap,
                                  int threads) {
  spec.validate();
  VerifyReport rep;
  rep.samples_used = samples;
  const auto elements = sample_elements<Scalar>(spec.group, samples, seed);

  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    const Term& term = spec.terms[t];
    const Eigen::Index dim = term.dim();
    std::vector<const Projector<Scalar>*> mine;
    Eigen::Index covered = 0;
    for (const auto& p : projs)
      if (p.path.term_index == static_cast<int>(t)) {
        mine.push_back(&p);
        covered += p.weight().dim();
      }
    if (mine.empty()) {
      rep.partition_applicable = false;
      continue;
    }
    if (covered != dim) rep.partition_applicable = false;
    const BasisKind basis = mine.front()->basis;

    for (const auto* p : mine) {
      // tr(P P^H) = ||P||_F^2; the stored dense matrix wins when present
      const double tr = p->dense ? std::real(std::complex<double>(p->dense->trace()))
                                 : p->phat.squaredNorm();
      rep.trace_residual = std::max(rep.trace_residual, std::abs(tr - p->weight().dim()));
    }

    if (dim <= dense_dim_cap) {
      // H = P P^H throughout; stored dense matrices take over where present
      // (so injected faults in them are seen), everything else runs factored.
      Mat<Scalar> sum = Mat<Scalar>::Zero(dim, dim);
      for (const auto* p : mine) {
        if (p->dense) sum += *p->dense;
        else sum.noalias() += p->phat * p->phat.adjoint();
      }
      if (rep.partition_applicable && covered == dim)
        rep.partition_residual =
            std::max(rep.partition_residual, max_abs<Scalar>(sum - Mat<Scalar>::Identity(dim, dim)));

      std::vector<double> idem(mine.size()), symm(mine.size());
      parallel_for(
          mine.size(),
          [&](std::size_t i) {
            if (mine[i]->dense) {
              const Mat<Scalar>& h = *mine[i]->dense;
              idem[i] = max_abs<Scalar>(h * h - h);
              symm[i] = max_abs<Scalar>(Mat<Scalar>(h.adjoint()) - h);
            } else {
              const Mat<Scalar>& p = mine[i]->phat;
              const Mat<Scalar> g =
                  p.adjoint() * p - Mat<Scalar>::Identity(p.cols(), p.cols());
              idem[i] = max_abs<Scalar>(Mat<Scalar>((p * g) * p.adjoint()));
              symm[i] = 0.0;  // P P^H is Hermitian by construction
            }
          },
          threads);
      for (double v : idem) rep.idempotence_residual = std::max(rep.idempotence_residual, v);
      for (double v : symm) rep.symmetry_residual = std::max(rep.symmetry_residual, v);

      // pairwise products H_i H_j = P_i (P_i^H P_j) P_j^H, i < j
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t i = 0; i < mine.size(); ++i)
        for (std::size_t j = i + 1; j < mine.size(); ++j) pairs.emplace_back(i, j);
      std::vector<double> cross(pairs.size());
      parallel_for(
          pairs.size(),
          [&](std::size_t k) {
            const auto [i, j] = pairs[k];
            if (mine[i]->dense || mine[j]->dense) {
              cross[k] = max_abs<Scalar>(mine[i]->densified() * mine[j]->densified());
            } else {
              const Mat<Scalar> g = mine[i]->phat.adjoint() * mine[j]->phat;
              cross[k] = max_abs<Scalar>(Mat<Scalar>((mine[i]->phat * g) * mine[j]->phat.adjoint()));
            }
          },
          threads);
      for (double v : cross) rep.annihilation_residual = std::max(rep.annihilation_residual, v);

      std::vector<double> equi(elements.size());
      parallel_for(
          elements.size(),
          [&](std::size_t e) {
            const Mat<Scalar> rho = term_rep_matrix<Scalar>(term, elements[e], basis);
            double worst = 0;
            for (const auto* p : mine) {
              if (p->dense) {
                worst = std::max(worst, max_abs<Scalar>(*p->dense * rho - rho * *p->dense));
              } else {
                // rho H - H rho = (rho P) P^H - P (rho^H P)^H
                const Mat<Scalar> a = rho * p->phat;
                const Mat<Scalar> b = rho.adjoint() * p->phat;
                worst = std::max(
                    worst, max_abs<Scalar>(Mat<Scalar>(a * p->phat.adjoint() - p->phat * b.adjoint())));
              }
            }
            equi[e] = worst;
          },
          threads);
      for (double v : equi) rep.equivariance_residual = std::max(rep.equivariance_residual, v);
    } else {
      // matrix-free spot checks on seeded random vectors
      rep.dense_checks = false;
      std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
      std::normal_distribution<double> gauss(0.0, 1.0);
      const int n_vec = 10;
      for (int k = 0; k < n_vec; ++k) {
        Vec<Scalar> v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
          if constexpr (std::is_same_v<Scalar, double>) v(i) = gauss(rng);
          else v(i) = cd(gauss(rng), gauss(rng));
        }
        const double vn = v.norm();
        std::vector<Vec<Scalar>> hv(mine.size());
        Vec<Scalar> sum = Vec<Scalar>::Zero(dim);
        for (std::size_t i = 0; i < mine.size(); ++i) {
          hv[i] = apply_projection(*mine[i], v);
          sum += hv[i];
        }
        if (rep.partition_applicable && covered == dim)
          rep.partition_residual =
              std::max(rep.partition_residual, (sum - v).template lpNorm<Eigen::Infinity>() / vn);
        for (std::size_t i = 0; i < mine.size(); ++i)
          rep.idempotence_residual = std::max(
              rep.idempotence_residual,
              (apply_projection(*mine[i], hv[i]) - hv[i]).template lpNorm<Eigen::Infinity>() / vn);
        // all pairs when affordable, a seeded sample otherwise
        const std::size_t all_pairs = mine.size() * (mine.size() - 1);
        const std::size_t budget = 512;
        for (std::size_t s = 0; s < std::min(all_pairs, budget); ++s) {
          std::size_t i, j;
          if (all_pairs <= budget) {
            i = s / (mine.size() - 1);
            j = s % (mine.size() - 1);
            if (j >= i) ++j;
          } else {
            i = rng() % mine.size();
            j = rng() % mine.size();
            if (i == j) continue;
          }
          rep.annihilation_residual =
              std::max(rep.annihilation_residual,
                       apply_projection(*mine[i], hv[j]).template lpNorm<Eigen::Infinity>() / vn);
        }
        for (const auto& e : elements) {
          const Vec<Scalar> rv = term_rep_apply<Scalar>(term, e, v, basis);
          for (const auto* p : mine) {
            const Vec<Scalar> lhs = apply_projection(*p, rv);
            const Vec<Scalar> rhs = term_rep_apply<Scalar>(term, e, apply_projection(*p, v), basis);
            rep.equivariance_residual = std::max(
                rep.equivariance_residual, (lhs - rhs).template lpNorm<Eigen::Infinity>() / vn);
          }
        }
      }
    }
  }
  return rep;
}

template std::vector<PathMatrix<double>> build_term_path_matrices<double>(const Term&, int, int);
template std::vector<PathMatrix<cd>> build_term_path_matrices<cd>(const Term&, int, int);
template std::vector<Projector<double>> decompose<double>(const SpaceSpec&, const DecomposeOptions&);
template std::vector<Projector<cd>> decompose<cd>(const SpaceSpec&, const DecomposeOptions&);
template Vec<double> apply_projection(const Projector<double>&, const Vec<double>&);
template Vec<cd> apply_projection(const Projector<cd>&, const Vec<cd>&);
template VerifyReport verify_decomposition<double>(const SpaceSpec&, const std::vector<Projector<double>>&,
                                                   int, std::uint64_t, Eigen::Index, int);
template VerifyReport verify_decomposition<cd>(const SpaceSpec&, const std::vector<Projector<cd>>&, int,
                                               std::uint64_t, Eigen::Index, int);

}  // namespace ict
