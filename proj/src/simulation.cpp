#include "rpdcov/harness/simulation.hpp"

#include "rpdcov/baselines.hpp"
#include "rpdcov/random.hpp"
#include "rpdcov/rpdc.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

namespace rpdcov::harness {

const char* to_string(SimMethod m) {
  switch (m) {
    case SimMethod::rpdc_gamma: return "rpdc-gamma";
    case SimMethod::rpdc_perm: return "rpdc-perm";
    case SimMethod::ddc: return "ddc";
    case SimMethod::wilks: return "wilks";
    case SimMethod::puri_sen: return "puri-sen";
  }
  return "unknown";
}

SimMethod parse_sim_method(const std::string& name) {
  if (name == "rpdc-gamma" || name == "rpdc") return SimMethod::rpdc_gamma;
  if (name == "rpdc-perm") return SimMethod::rpdc_perm;
  if (name == "ddc") return SimMethod::ddc;
  if (name == "wilks") return SimMethod::wilks;
  if (name == "puri-sen") return SimMethod::puri_sen;
  throw DomainError("unknown test method '" + name + "'");
}

TestResult run_test(SimMethod method, const MatrixXd& X, const MatrixXd& Y, const TestOptions& opt) {
  RpdcConfig cfg;
  cfg.k_projections = opt.k_projections;
  cfg.seed = opt.seed;
  cfg.significance = opt.significance;
  cfg.permutations = opt.permutations;
  switch (method) {
    case SimMethod::rpdc_gamma: return gamma_test(X, Y, cfg);
    case SimMethod::rpdc_perm: return permutation_test(X, Y, cfg);
    case SimMethod::ddc: return ddc_gamma_test(X, Y, opt.significance);
    case SimMethod::wilks: return wilks_lambda_test(X, Y, opt.significance);
    case SimMethod::puri_sen: return puri_sen_test(X, Y, opt.significance);
  }
  throw DomainError("run_test: unknown method");
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("RPDCOV_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v > 0) n = static_cast<unsigned>(v);
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  if (jobs < n) n = static_cast<unsigned>(std::max<std::size_t>(1, jobs));
  return n;
}

namespace {

struct JobOutcome {
  bool ok = false;
  bool reject = false;
  bool degenerate = false;
  double seconds = 0.0;
  std::string error;
};

}  // namespace

SimulationReport run_simulation(const SimulationConfig& config) {
  if (config.cells.empty()) throw SizeError("run_simulation: empty grid");
  if (config.replicates < 1) throw SizeError("run_simulation: replicates must be >= 1");
  for (const auto& c : config.cells) c.example.validate();

  const auto reps = static_cast<std::size_t>(config.replicates);
  const std::size_t jobs = config.cells.size() * reps;
  std::vector<JobOutcome> outcomes(jobs);
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (std::size_t j = next.fetch_add(1); j < jobs; j = next.fetch_add(1)) {
      const SimulationCell& cell = config.cells[j / reps];
      const auto r = static_cast<std::uint64_t>(j % reps);
      JobOutcome& out = outcomes[j];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        ExampleSpec spec = cell.example;
        spec.seed = derive_seed(cell.example.seed, r);
        const PairedSample data = generate_example(spec);
        TestOptions opt{config.significance, config.k_projections, config.permutations, derive_seed(config.seed, r)};
        const TestResult res = run_test(cell.method, data.X, data.Y, opt);
        out.ok = true;
        out.reject = res.reject;
        out.degenerate = res.degenerate;
      } catch (const std::exception& e) {
        out.error = e.what();
      }
      out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };

  const unsigned nthreads = worker_count(config.threads, jobs);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SimulationReport report;
  report.seed = config.seed;
  report.significance = config.significance;
  report.k_projections = config.k_projections;
  report.permutations = config.permutations;
  report.replicates = config.replicates;
  for (std::size_t c = 0; c < config.cells.size(); ++c) {
    CellResult cr;
    cr.cell = config.cells[c];
    cr.replicates = config.replicates;
    for (std::size_t r = 0; r < reps; ++r) {
      const JobOutcome& o = outcomes[c * reps + r];
      cr.seconds += o.seconds;
      if (!o.ok) {
        if (cr.failures++ == 0) cr.error = o.error;
        continue;
      }
      cr.rejections += o.reject ? 1 : 0;
      cr.degenerate += o.degenerate ? 1 : 0;
    }
    const std::int64_t done = cr.replicates - cr.failures;
    cr.rejection_rate = done > 0 ? static_cast<double>(cr.rejections) / static_cast<double>(done) : 0.0;
    report.cells.push_back(std::move(cr));
  }
  return report;
}

}  // namespace rpdcov::harness
