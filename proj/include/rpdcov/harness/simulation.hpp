#pragma once

// Monte Carlo power / type-I grids. Every (cell, replicate) pair is an
// independent job; results are stored by index, so the report does not
// depend on the number of worker threads or their scheduling.

#include "rpdcov/harness/examples.hpp"
#include "rpdcov/test_result.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rpdcov::harness {

enum class SimMethod { rpdc_gamma, rpdc_perm, ddc, wilks, puri_sen };

const char* to_string(SimMethod m);
// Accepts the CLI spellings: rpdc-gamma, rpdc-perm, ddc, wilks, puri-sen
// (and "rpdc" for rpdc-gamma). Throws DomainError otherwise.
SimMethod parse_sim_method(const std::string& name);

struct SimulationCell {
  SimMethod method = SimMethod::rpdc_gamma;
  ExampleSpec example;
};

struct SimulationConfig {
  std::vector<SimulationCell> cells;
  std::int64_t replicates = 100;
  std::uint64_t seed = 0;
  double significance = 0.05;
  std::int64_t k_projections = 50;
  std::int64_t permutations = 200;
  // 0 means: RPDCOV_THREADS if set, else the number of logical cores.
  unsigned threads = 0;
};

struct CellResult {
  SimulationCell cell;
  std::int64_t replicates = 0;
  std::int64_t rejections = 0;
  std::int64_t degenerate = 0;
  std::int64_t failures = 0;
  double rejection_rate = 0.0;  // rejections / successful replicates
  double seconds = 0.0;         // summed per-replicate wall time
  std::string error;            // first failure message, if any
};

struct SimulationReport {
  static constexpr int kSchemaVersion = 1;
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 0;
  double significance = 0.05;
  std::int64_t k_projections = 50;
  std::int64_t permutations = 200;
  std::int64_t replicates = 0;
  std::vector<CellResult> cells;
};

struct TestOptions {
  double significance = 0.05;
  std::int64_t k_projections = 50;
  std::int64_t permutations = 200;
  std::uint64_t seed = 0;
};

TestResult run_test(SimMethod method, const MatrixXd& X, const MatrixXd& Y, const TestOptions& opt);

// Replicate r of a cell draws its data with seed derive_seed(example.seed, r),
// so cells that share an example see identical datasets, and runs its test
// with seed derive_seed(config.seed, r).
SimulationReport run_simulation(const SimulationConfig& config);

unsigned worker_count(unsigned requested, std::size_t jobs);

}  // namespace rpdcov::harness
