#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ict {

struct BenchRecord {
  int rank = 0;
  double wall_seconds = 0;
  std::uint64_t n_paths = 0;
  int threads = 1;
  std::string host;
  std::uint64_t peak_bytes_estimate = 0;
  double oracle_seconds = 0;  // numeric-baseline timing; measured at ranks <= 4 only
};

/// Cold-cache wall time of the full factored decomposition per rank, from
/// min_rank to max_rank. Medians of 3 runs for ranks <= 6, single run above.
/// At ranks <= 4 the commutant-nullspace oracle is timed as the numeric
/// baseline datapoint.
std::vector<BenchRecord> run_decomposition_bench(int max_rank, int min_rank = 2, int threads = -1);

/// Least-squares slope and R^2 of log(wall_seconds) against rank.
struct TrendFit {
  double slope = 0;
  double r2 = 0;
};
TrendFit fit_log_trend(const std::vector<BenchRecord>& records, int rank_lo, int rank_hi);

}  // namespace ict
