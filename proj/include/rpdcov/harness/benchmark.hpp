#pragma once

// Wall-clock comparison of the direct O(n^2) estimator against the
// projected O(K n log n) one on identical data, and the break-even sample
// size where their running times cross.

#include "rpdcov/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rpdcov::harness {

struct BenchmarkConfig {
  std::vector<Eigen::Index> n_list{1000, 2000, 4000, 8000};
  // (p, q) pairs; the sweep over p + q drives the break-even curve.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> dims{{10, 10}};
  std::int64_t k_projections = 50;
  int repeats = 3;
  std::uint64_t seed = 0;
  // DDC is skipped when n^2 (p + q) exceeds this many operations.
  double ddc_work_budget = 2e11;
};

struct BenchmarkRow {
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  Eigen::Index q = 0;
  std::string method;  // "ddc" or "rpdc"
  int repeats = 0;
  double mean_seconds = 0.0;
  double sd_seconds = 0.0;
  double median_seconds = 0.0;
  bool skipped = false;
  std::string note;
};

struct TimingSummary {
  double mean = 0.0;
  double sd = 0.0;
  double median = 0.0;
};

TimingSummary summarize(std::vector<double> seconds);

std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config);

struct BreakEven {
  Eigen::Index p = 0;
  Eigen::Index q = 0;
  std::optional<double> n0;
  std::string note;
};

// Fits t_ddc(n) - t_rpdc(n) by least squares on the basis
// {n^2, n log n, n, 1} (truncated to the number of sample sizes available)
// and returns the smallest root inside the sampled range of n, if any.
BreakEven break_even(const std::vector<BenchmarkRow>& rows, Eigen::Index p, Eigen::Index q);

}  // namespace rpdcov::harness
