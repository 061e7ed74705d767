// Command-line front end.
//
// Exit codes: 0 success, 1 test ran but the data were degenerate,
// 2 usage or input error, 3 numeric failure.

#include "rpdcov/baselines.hpp"
#include "rpdcov/dcov.hpp"
#include "rpdcov/harness/benchmark.hpp"
#include "rpdcov/harness/examples.hpp"
#include "rpdcov/harness/io.hpp"
#include "rpdcov/harness/simulation.hpp"
#include "rpdcov/rpdc.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace rpdcov;
using namespace rpdcov::harness;

struct Common {
  std::uint64_t seed = 0;
  std::int64_t k = 50;
  std::int64_t perms = 200;
  double alpha = 0.05;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Master random seed");
  cmd->add_option("--k", c.k, "Number of random projections")->check(CLI::PositiveNumber);
  cmd->add_option("--perms", c.perms, "Permutation replicates")->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", c.alpha, "Significance level");
  cmd->add_option("--out", c.out, "Output file (default stdout)");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

// Writes either a JSON document or the CSV produced by `csv`.
template <typename Csv>
void emit(const Common& c, const nlohmann::json& j, Csv&& csv) {
  std::ostringstream body;
  if (c.format == "csv") {
    csv(body);
  } else {
    body << j.dump(2) << '\n';
  }
  if (c.out.empty()) {
    std::cout << body.str();
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw IoError("cannot write '" + c.out + "'");
  f << body.str();
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> parse_dims(const std::vector<std::string>& specs) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> dims;
  for (const auto& s : specs) {
    const auto x = s.find('x');
    try {
      if (x == std::string::npos) {
        const auto d = std::stol(s);
        dims.emplace_back(d, d);
      } else {
        dims.emplace_back(std::stol(s.substr(0, x)), std::stol(s.substr(x + 1)));
      }
    } catch (const std::logic_error&) {
      throw DomainError("bad --dims entry '" + s + "' (expected P or PxQ)");
    }
    if (dims.back().first < 1 || dims.back().second < 1) throw DimensionError("--dims entries must be positive");
  }
  return dims;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distance covariance estimation and independence testing"};
  app.require_subcommand(1);

  Common dc_opt, test_opt, sim_opt, bench_opt;

  std::string x_path, y_path, dcov_method = "fast";
  auto* dcov_cmd = app.add_subcommand("dcov", "Estimate the distance covariance of two samples");
  dcov_cmd->add_option("--x", x_path, "CSV file for X")->required();
  dcov_cmd->add_option("--y", y_path, "CSV file for Y")->required();
  dcov_cmd->add_option("--method", dcov_method, "Estimator")->check(CLI::IsMember({"fast", "brute", "rpdc"}));
  add_common(dcov_cmd, dc_opt);

  std::string test_method = "rpdc-gamma";
  auto* test_cmd = app.add_subcommand("test", "Run an independence test");
  test_cmd->add_option("--x", x_path, "CSV file for X")->required();
  test_cmd->add_option("--y", y_path, "CSV file for Y")->required();
  test_cmd->add_option("--method", test_method, "Test")
      ->check(CLI::IsMember({"rpdc-gamma", "rpdc-perm", "ddc", "wilks", "puri-sen"}));
  add_common(test_cmd, test_opt);

  ExampleSpec spec;
  std::vector<Eigen::Index> sim_ns;
  std::vector<std::string> sim_methods{"rpdc-gamma"};
  std::int64_t reps = 100;
  bool full_n = false;
  auto* sim_cmd = app.add_subcommand("simulate", "Estimate rejection rates on a synthetic example");
  sim_cmd->add_option("--example", spec.id, "Example 1..7")->required()->check(CLI::Range(1, 7));
  sim_cmd->add_option("--n", sim_ns, "Sample size(s)")->delimiter(',');
  sim_cmd->add_option("--p", spec.p, "Dimension of X");
  sim_cmd->add_option("--q", spec.q, "Dimension of Y");
  sim_cmd->add_option("--rho", spec.rho, "Correlation (example 5)");
  sim_cmd->add_option("--sigma", spec.sigma, "Noise level (example 6)");
  sim_cmd->add_option("--t-frac", spec.t_frac, "Change point as a fraction of n (example 7)");
  sim_cmd->add_option("--reps", reps, "Replicates per cell")->check(CLI::PositiveNumber);
  sim_cmd->add_flag("--full", full_n, "Use 400 replicates per cell");
  sim_cmd->add_option("--methods", sim_methods, "Tests to run")->delimiter(',');
  add_common(sim_cmd, sim_opt);

  BenchmarkConfig bench;
  std::vector<std::string> dims_spec{"10x10"};
  bool want_break_even = false;
  auto* bench_cmd = app.add_subcommand("bench", "Time the direct and projected estimators");
  bench_cmd->add_option("--n-list", bench.n_list, "Sample sizes")->delimiter(',');
  bench_cmd->add_option("--dims", dims_spec, "Dimension pairs, P or PxQ")->delimiter(',');
  bench_cmd->add_option("--repeats", bench.repeats, "Timed repeats (>= 3)");
  bench_cmd->add_option("--ddc-budget", bench.ddc_work_budget, "Skip ddc above this n^2 (p+q)");
  bench_cmd->add_flag("--break-even", want_break_even, "Fit the break-even sample size per dimension pair");
  add_common(bench_cmd, bench_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (dcov_cmd->parsed()) {
      const MatrixXd X = read_csv_file(x_path);
      const MatrixXd Y = read_csv_file(y_path);
      DcovEstimate e;
      if (dcov_method == "fast") {
        if (X.cols() != 1 || Y.cols() != 1) {
          throw DimensionError("the fast estimator needs univariate X and Y (got " + std::to_string(X.cols()) +
                               " and " + std::to_string(Y.cols()) + " columns); use --method brute or rpdc");
        }
        e = dcov_unbiased_fast(X.col(0), Y.col(0));
      } else if (dcov_method == "brute") {
        e = dcov_unbiased_bruteforce(X, Y);
      } else {
        RpdcConfig cfg;
        cfg.k_projections = dc_opt.k;
        cfg.seed = dc_opt.seed;
        e = rpdc_estimate(X, Y, cfg);
      }
      emit(dc_opt, to_json(e), [&](std::ostream& o) { write_csv(o, e); });
      return 0;
    }

    if (test_cmd->parsed()) {
      const MatrixXd X = read_csv_file(x_path);
      const MatrixXd Y = read_csv_file(y_path);
      const TestOptions opt{test_opt.alpha, test_opt.k, test_opt.perms, test_opt.seed};
      const TestResult r = run_test(parse_sim_method(test_method), X, Y, opt);
      emit(test_opt, to_json(r), [&](std::ostream& o) { write_csv(o, r); });
      if (r.degenerate) {
        std::cerr << "warning: " << r.note << '\n';
        return 1;
      }
      return 0;
    }

    if (sim_cmd->parsed()) {
      SimulationConfig cfg;
      cfg.replicates = full_n ? 400 : reps;
      cfg.seed = sim_opt.seed;
      cfg.significance = sim_opt.alpha;
      cfg.k_projections = sim_opt.k;
      cfg.permutations = sim_opt.perms;
      if (sim_ns.empty()) sim_ns.push_back(spec.n);
      spec.seed = derive_seed(sim_opt.seed, 0x64617461ULL);
      for (Eigen::Index n : sim_ns) {
        for (const auto& m : sim_methods) {
          SimulationCell cell;
          cell.method = parse_sim_method(m);
          cell.example = spec;
          cell.example.n = n;
          cfg.cells.push_back(cell);
        }
      }
      const SimulationReport report = run_simulation(cfg);
      emit(sim_opt, to_json(report), [&](std::ostream& o) { write_csv(o, report); });
      for (const auto& c : report.cells) {
        if (c.failures > 0) std::cerr << "warning: " << c.failures << " failed replicates: " << c.error << '\n';
      }
      return 0;
    }

    if (bench_cmd->parsed()) {
      bench.dims = parse_dims(dims_spec);
      bench.k_projections = bench_opt.k;
      bench.seed = bench_opt.seed;
      const auto rows = run_benchmark(bench);
      std::vector<BreakEven> be;
      if (want_break_even) {
        for (const auto& [p, q] : bench.dims) be.push_back(break_even(rows, p, q));
      }
      emit(bench_opt, to_json(rows, be), [&](std::ostream& o) { write_csv(o, rows); });
      return 0;
    }
  } catch (const DegenerateData& e) {
    std::cerr << "degenerate data: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const SizeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
