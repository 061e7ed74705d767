// Acceptance checks: one PASS/FAIL line per criterion. Exits non-zero if
// any criterion fails.

#include "rpdcov/baselines.hpp"
#include "rpdcov/dcov.hpp"
#include "rpdcov/harness/benchmark.hpp"
#include "rpdcov/harness/examples.hpp"
#include "rpdcov/harness/simulation.hpp"
#include "rpdcov/projection.hpp"
#include "rpdcov/rpdc.hpp"
#include "rpdcov/spectrum.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace rpdcov;
using namespace rpdcov::harness;

namespace {

int g_failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("%s  %2d  %-28s %s\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MatrixXd normal_matrix(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  MatrixXd m(n, d);
  for (auto& v : m.reshaped()) v = z(rng);
  return m;
}

struct MeanSe {
  double mean = 0, se = 0;
};

MeanSe mean_se(const std::vector<double>& v) {
  MeanSe r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return r;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void criterion1() {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> size(4, 512);
  std::normal_distribution<double> z;
  double worst = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int c = 0; c < 1000; ++c) {
    const int n = size(rng);
    Eigen::VectorXd x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = z(rng);
      y[i] = 0.5 * x[i] * x[i] + z(rng);
      // Every third case carries heavy ties.
      if (c % 3 == 0) {
        x[i] = std::round(2 * x[i]);
        y[i] = std::round(y[i]);
      }
    }
    const double fast = dcov_unbiased_fast(x, y).value;
    const double brute = dcov_unbiased_bruteforce(x, y).value;
    worst = std::max(worst, std::fabs(fast - brute) / std::max(1.0, std::fabs(brute)));
  }
  const double t = seconds_since(t0);
  report(1, "oracle equivalence", worst <= 1e-9 && t < 10.0,
         fmt("max |fast-brute|/max(1,|brute|) = %.2e (<= 1e-9), %.2f s (< 10 s)", worst, t));
}

void criterion2() {
  Eigen::VectorXd v(4);
  v << 0, 1, 2, 3;
  const double fast = dcov_unbiased_fast(v, v).value;
  const double brute = dcov_unbiased_bruteforce(v, v).value;
  const double h = h4_kernel(MatrixXd(v), MatrixXd(v));
  const double err = std::max({std::fabs(fast - 2.0 / 3.0), std::fabs(brute - 2.0 / 3.0), std::fabs(h - 2.0 / 3.0)});
  report(2, "hand value", err <= 1e-14, fmt("fast %.17g, brute %.17g, h4 %.17g; max err %.1e", fast, brute, h, err));
}

void criterion3() {
  std::mt19937_64 rng(3);
  const MatrixXd X = normal_matrix(200, 3, rng);
  const MatrixXd Y = X.array().square().matrix() + normal_matrix(200, 3, rng);
  const double truth = dcov_unbiased_bruteforce(X, Y).value;

  std::vector<double> single;
  for (std::uint64_t k = 0; k < 10000; ++k) {
    Engine e = make_engine(RngSeed{3, k});
    const auto u = sample_unit_sphere(3, e);
    const auto v = sample_unit_sphere(3, e);
    single.push_back(projected_dcov(X, Y, u, v).value);
  }
  const MeanSe ms = mean_se(single);
  const double z = std::fabs(ms.mean - truth) / ms.se;

  const auto rmse = [&](std::int64_t K) {
    double ss = 0;
    const int reps = 400;
    for (int r = 0; r < reps; ++r) {
      RpdcConfig cfg;
      cfg.k_projections = K;
      cfg.seed = derive_seed(static_cast<std::uint64_t>(K), static_cast<std::uint64_t>(r));
      const double d = rpdc_estimate(X, Y, cfg).value - truth;
      ss += d * d;
    }
    return std::sqrt(ss / reps);
  };
  const double ratio = rmse(100) / rmse(400);
  report(3, "projection identity", z <= 4.0 && ratio >= 1.6 && ratio <= 2.5,
         fmt("mean of 1e4 = %.6f vs brute %.6f (%.2f SE, <= 4); RMSE(K=100)/RMSE(K=400) = %.3f in [1.6, 2.5]",
             ms.mean, truth, z, ratio));
}

void criterion4() {
  bool ok = true;
  std::ostringstream detail;
  for (Eigen::Index p : {2, 3, 10}) {
    Engine e = make_engine(RngSeed{4, static_cast<std::uint64_t>(p)});
    std::vector<double> vals;
    const double cp = cp_constant(p);
    for (int i = 0; i < 100000; ++i) {
      const auto u = sample_unit_sphere(p, e);
      const auto v = sample_unit_sphere(p, e);
      vals.push_back(cp * std::fabs(u.components().dot(v.components())));
    }
    const MeanSe ms = mean_se(vals);
    const double z = std::fabs(ms.mean - 1.0) / ms.se;
    ok = ok && z <= 4.0;
    detail << "p=" << p << ": " << fmt("%.4f (%.2f SE)", ms.mean, z) << (p == 10 ? "" : "; ");
  }
  report(4, "sphere constant identity", ok, detail.str());
}

SimulationReport simulate(std::vector<SimulationCell> cells, std::int64_t reps, std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.cells = std::move(cells);
  cfg.replicates = reps;
  cfg.seed = seed;
  cfg.k_projections = 50;
  return run_simulation(cfg);
}

ExampleSpec spec(int id, Eigen::Index n, Eigen::Index p, Eigen::Index q, std::uint64_t seed) {
  ExampleSpec s;
  s.id = id;
  s.n = n;
  s.p = p;
  s.q = q;
  s.seed = seed;
  return s;
}

std::string failures(const CellResult& c) {
  return c.failures ? fmt(" [%lld failed: %s]", static_cast<long long>(c.failures), c.error.c_str()) : "";
}

void criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  ExampleSpec s = spec(5, 500, 10, 10, 5);
  s.rho = 0.0;
  const auto r = simulate({{SimMethod::rpdc_gamma, s}}, 400, 5);
  const double rate = r.cells[0].rejection_rate;
  const double t = seconds_since(t0);
  report(5, "type-I calibration", rate >= 0.02 && rate <= 0.08 && r.cells[0].failures == 0,
         fmt("rpdc-gamma rejection rate %.4f in [0.02, 0.08] over 400 replicates (%.1f s)", rate, t) +
             failures(r.cells[0]));
}

void criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExampleSpec small = spec(4, 2000, 10, 10, 61);
  const ExampleSpec large = spec(4, 2000, 1000, 1000, 62);
  const auto r = simulate({{SimMethod::rpdc_gamma, small}, {SimMethod::rpdc_gamma, large}, {SimMethod::ddc, large}},
                          100, 6);
  const double p10 = r.cells[0].rejection_rate, p1000 = r.cells[1].rejection_rate, ddc = r.cells[2].rejection_rate;
  bool ok = p10 >= 0.95 && p1000 <= 0.15 && ddc >= 0.95;
  for (const auto& c : r.cells) ok = ok && c.failures == 0;
  report(6, "power reproduction", ok,
         fmt("rpdc (10,10) %.2f >= 0.95; rpdc (1000,1000) %.2f <= 0.15; ddc (1000,1000) %.2f >= 0.95 (%.0f s)", p10,
             p1000, ddc, seconds_since(t0)) +
             failures(r.cells[0]) + failures(r.cells[1]) + failures(r.cells[2]));
}

void criterion7() {
  ExampleSpec s = spec(6, 300, 10, 10, 7);
  s.sigma = 1.0;
  const auto r = simulate({{SimMethod::rpdc_gamma, s}, {SimMethod::ddc, s}, {SimMethod::wilks, s},
                           {SimMethod::puri_sen, s}},
                          100, 7);
  const double rp = r.cells[0].rejection_rate, dd = r.cells[1].rejection_rate;
  const double wl = r.cells[2].rejection_rate, ps = r.cells[3].rejection_rate;
  bool ok = rp > 0.9 && dd > 0.9 && wl <= 0.15 && ps <= 0.15;
  for (const auto& c : r.cells) ok = ok && c.failures == 0;
  report(7, "nonlinear power", ok,
         fmt("rpdc %.2f > 0.9; ddc %.2f > 0.9; wilks %.2f <= 0.15; puri-sen %.2f <= 0.15", rp, dd, wl, ps));
}

void criterion8() {
  BenchmarkConfig cfg;
  cfg.n_list = {4000, 8000, 16000};
  cfg.dims = {{10, 10}};
  cfg.k_projections = 50;
  cfg.repeats = 7;
  cfg.seed = 8;
  const auto rows = run_benchmark(cfg);
  const auto t = [&](Eigen::Index n, const char* m) {
    for (const auto& r : rows) {
      if (r.n == n && r.method == m) return r.median_seconds;
    }
    return std::nan("");
  };
  const double d1 = t(8000, "ddc") / t(4000, "ddc"), d2 = t(16000, "ddc") / t(8000, "ddc");
  const double r1 = t(8000, "rpdc") / t(4000, "rpdc"), r2 = t(16000, "rpdc") / t(8000, "rpdc");
  const auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  const bool ok = t(8000, "rpdc") < t(8000, "ddc") && in(d1, 3.0, 5.5) && in(d2, 3.0, 5.5) && in(r1, 1.8, 2.6) &&
                  in(r2, 1.8, 2.6);
  report(8, "speed crossover", ok,
         fmt("n=8000: rpdc %.3f s < ddc %.3f s; ddc doubling %.2f, %.2f in [3.0, 5.5]; rpdc doubling %.2f, %.2f in "
             "[1.8, 2.6]",
             t(8000, "rpdc"), t(8000, "ddc"), d1, d2, r1, r2));
}

Spectrum<double> spectrum_of(const MatrixXd& X) { return empirical_spectrum(centered_kernel_matrix(X)); }

void criterion9() {
  std::mt19937_64 rng(9);
  const MatrixXd X3 = normal_matrix(500, 3, rng);
  double grand = 0;
  for (Eigen::Index i = 0; i < X3.rows(); ++i) {
    for (Eigen::Index j = 0; j < X3.rows(); ++j) grand += (X3.row(i) - X3.row(j)).norm();
  }
  const double target = grand / (500.0 * 500.0);
  const double trace_err = std::fabs(spectrum_of(X3).sum() - target) / target;

  const MatrixXd x = normal_matrix(500, 1, rng);
  const double expected = 2.0 / std::sqrt(std::numbers::pi);
  const double sum1 = spectrum_of(x).sum();
  const double mean_err = std::fabs(sum1 - expected) / expected;

  double worst_sq = 0;
  for (Eigen::Index d : {1, 2}) {
    const MatrixXd X = normal_matrix(500, d, rng);
    const MatrixXd Y = normal_matrix(500, d, rng);
    const auto t = tensor_spectrum(spectrum_of(X), spectrum_of(Y), 500 * 500);
    const auto m = distance_moments_bruteforce(X, Y);
    const double rhs = omega_xx(m) * omega_yy(m);
    worst_sq = std::max(worst_sq, std::fabs(t.sum_squares() - rhs) / rhs);
  }
  report(9, "spectrum identities", trace_err <= 1e-10 && mean_err <= 0.05 && worst_sq <= 0.05,
         fmt("trace rel err %.1e (<= 1e-10); 1-D normal sum %.4f vs 2/sqrt(pi) (%.2f%%, <= 5%%); squared tensor sum "
             "vs Omega(X,X) Omega(Y,Y) %.2f%% (<= 5%%, d = 1, 2)",
             trace_err, sum1, 100 * mean_err, 100 * worst_sq));
}

void criterion10() {
  const auto d = generate_example(spec(1, 300, 10, 10, 10));
  const auto sx = spectrum_of(d.X);
  const auto sy = spectrum_of(d.Y);
  const double sum_w = sx.sum() * sy.sum();
  const double sum_w2 = sx.sum_squares() * sy.sum_squares();
  const double gq = gamma_quantile(gamma_from_weight_moments(sum_w, sum_w2), 0.95);
  const auto top = tensor_spectrum(sx, sy, 2000);
  const double sq = simulate_weighted_chisq_quantile(top.eigenvalues, 0.95, 100000, 10, sum_w - top.sum());
  const double rel = std::fabs(gq - sq) / sq;
  report(10, "gamma tail agreement", rel <= 0.10,
         fmt("gamma 0.95 quantile %.5f vs simulated %.5f (%.2f%%, <= 10%%; 1e5 draws, top 2000 weights + mean of "
             "the rest)",
             gq, sq, 100 * rel));
}

void guarded(int id, const char* title, const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, title, false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded(1, "oracle equivalence", criterion1);
  guarded(2, "hand value", criterion2);
  guarded(3, "projection identity", criterion3);
  guarded(4, "sphere constant identity", criterion4);
  guarded(5, "type-I calibration", criterion5);
  guarded(6, "power reproduction", criterion6);
  guarded(7, "nonlinear power", criterion7);
  guarded(8, "speed crossover", criterion8);
  guarded(9, "spectrum identities", criterion9);
  guarded(10, "gamma tail agreement", criterion10);
  std::printf("%d of 10 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
