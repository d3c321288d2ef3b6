#include "ict/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "ict/decomp.hpp"
#include "ict/oracle.hpp"
#include "ict/parallel.hpp"

namespace ict {

namespace {

double time_once(int rank, int threads) {
  clear_cg_caches();
  const SpaceSpec spec = cartesian_space(rank);
  DecomposeOptions opts;
  opts.threads = threads;
  const auto t0 = std::chrono::steady_clock::now();
  auto projs = decompose<double>(spec, opts);
  const auto t1 = std::chrono::steady_clock::now();
  if (projs.empty()) throw std::logic_error("bench: empty decomposition");
  return std::chrono::duration<double>(t1 - t0).count();
}

std::uint64_t pow_u64(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

std::vector<BenchRecord> run_decomposition_bench(int max_rank, int min_rank, int threads) {
  if (max_rank > 9) throw std::invalid_argument("run_decomposition_bench: max rank is 9");
  std::vector<BenchRecord> out;
  const int nt = resolve_threads(threads);
  const std::string host = std::to_string(std::thread::hardware_concurrency()) + "-core";
  for (int rank = min_rank; rank <= max_rank; ++rank) {
    BenchRecord rec;
    rec.rank = rank;
    rec.threads = nt;
    rec.host = host;
    std::uint64_t paths = 0;
    for (int l = 0; l <= rank; ++l) paths += multiplicity(rank, Weight::integer(l));
    rec.n_paths = paths;
    // working set: the last two path-matrix levels, 9^n + 9^{n-1} doubles
    rec.peak_bytes_estimate = 8 * (pow_u64(9, rank) + pow_u64(9, rank - 1));
    if (rank <= 6) {
      double runs[3];
      for (double& r : runs) r = time_once(rank, threads);
      std::sort(runs, runs + 3);
      rec.wall_seconds = runs[1];
    } else {
      rec.wall_seconds = time_once(rank, threads);
    }
    if (rank <= 4) {
      const SpaceSpec spec = cartesian_space(rank);
      const auto t0 = std::chrono::steady_clock::now();
      const auto oracle = commutant_nullspace<double>(spec, spec);
      rec.oracle_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (oracle.report.dimension != static_cast<Eigen::Index>(end_dimension(rank)))
        throw std::logic_error("bench: oracle dimension disagrees with end_dimension");
    }
    out.push_back(rec);
  }
  return out;
}

TrendFit fit_log_trend(const std::vector<BenchRecord>& records, int rank_lo, int rank_hi) {
  std::vector<double> xs, ys;
  for (const auto& r : records)
    if (r.rank >= rank_lo && r.rank <= rank_hi && r.wall_seconds > 0) {
      xs.push_back(r.rank);
      ys.push_back(std::log(r.wall_seconds));
    }
  TrendFit fit;
  const std::size_t n = xs.size();
  if (n < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0) return fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  const double ss_tot = syy - sy * sy / n;
  const double ss_res = ss_tot - fit.slope * (sxy - sx * sy / n);
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace ict
