#include "rpdcov/harness/benchmark.hpp"

#include "rpdcov/dcov.hpp"
#include "rpdcov/harness/examples.hpp"
#include "rpdcov/random.hpp"
#include "rpdcov/rpdc.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

namespace rpdcov::harness {

TimingSummary summarize(std::vector<double> seconds) {
  TimingSummary s;
  if (seconds.empty()) return s;
  const double m = static_cast<double>(seconds.size());
  for (double v : seconds) s.mean += v;
  s.mean /= m;
  if (seconds.size() > 1) {
    for (double v : seconds) s.sd += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(s.sd / (m - 1.0));
  }
  std::sort(seconds.begin(), seconds.end());
  const std::size_t h = seconds.size() / 2;
  s.median = seconds.size() % 2 ? seconds[h] : 0.5 * (seconds[h - 1] + seconds[h]);
  return s;
}

namespace {

template <typename F>
TimingSummary time_repeats(int repeats, F&& f) {
  volatile double sink = f();  // warm-up, discarded
  std::vector<double> t;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    sink = f();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  (void)sink;
  return summarize(std::move(t));
}

BenchmarkRow make_row(Eigen::Index n, Eigen::Index p, Eigen::Index q, const char* method, int repeats,
                      const TimingSummary& s) {
  BenchmarkRow row;
  row.n = n;
  row.p = p;
  row.q = q;
  row.method = method;
  row.repeats = repeats;
  row.mean_seconds = s.mean;
  row.sd_seconds = s.sd;
  row.median_seconds = s.median;
  return row;
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config) {
  if (config.repeats < 3) throw DomainError("benchmark: repeats must be >= 3");
  if (config.n_list.empty() || config.dims.empty()) throw SizeError("benchmark: empty n list or dims");
  RpdcConfig rc;
  rc.k_projections = config.k_projections;
  rc.seed = config.seed;
  rc.validate();

  std::vector<BenchmarkRow> rows;
  for (const auto& [p, q] : config.dims) {
    for (Eigen::Index n : config.n_list) {
      ExampleSpec spec;
      spec.id = 3;
      spec.n = n;
      spec.p = p;
      spec.q = q;
      spec.seed = derive_seed(config.seed, static_cast<std::uint64_t>(n));
      const PairedSample data = generate_example(spec);

      const double work = static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(p + q);
      if (work > config.ddc_work_budget) {
        BenchmarkRow row = make_row(n, p, q, "ddc", 0, {});
        row.skipped = true;
        row.note = "skipped: n^2 (p+q) exceeds the work budget";
        rows.push_back(row);
      } else {
        rows.push_back(make_row(n, p, q, "ddc", config.repeats, time_repeats(config.repeats, [&] {
                                  return dcov_unbiased_bruteforce(data.X, data.Y).value;
                                })));
      }
      rows.push_back(make_row(n, p, q, "rpdc", config.repeats, time_repeats(config.repeats, [&] {
                                return rpdc_estimate(data.X, data.Y, rc).value;
                              })));
    }
  }
  return rows;
}

BreakEven break_even(const std::vector<BenchmarkRow>& rows, Eigen::Index p, Eigen::Index q) {
  BreakEven be;
  be.p = p;
  be.q = q;
  std::map<Eigen::Index, std::pair<std::optional<double>, std::optional<double>>> by_n;
  for (const auto& r : rows) {
    if (r.p != p || r.q != q || r.skipped) continue;
    auto& slot = by_n[r.n];
    (r.method == "ddc" ? slot.first : slot.second) = r.mean_seconds;
  }
  std::vector<double> ns, diff;
  for (const auto& [n, t] : by_n) {
    if (t.first && t.second) {
      ns.push_back(static_cast<double>(n));
      diff.push_back(*t.first - *t.second);
    }
  }
  if (ns.size() < 2) {
    be.note = "need timings of both methods at two or more sample sizes";
    return be;
  }

  // Columns scaled by the largest n keep the normal equations well conditioned.
  const auto cols = static_cast<Eigen::Index>(std::min<std::size_t>(4, ns.size()));
  const double scale = ns.back();
  const auto basis = [&](double n, Eigen::Index j) {
    const double x = n / scale;
    switch (j) {
      case 0: return x * x;
      case 1: return x * std::log(n);
      case 2: return x;
      default: return 1.0;
    }
  };
  Eigen::MatrixXd A(static_cast<Eigen::Index>(ns.size()), cols);
  Eigen::VectorXd b(static_cast<Eigen::Index>(ns.size()));
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) A(i, j) = basis(ns[static_cast<std::size_t>(i)], j);
    b[i] = diff[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
  const auto fit = [&](double n) {
    double s = 0;
    for (Eigen::Index j = 0; j < cols; ++j) s += coef[j] * basis(n, j);
    return s;
  };

  // Scan a geometric grid for the first sign change, then bisect.
  const double lo = ns.front(), hi = ns.back();
  constexpr int kGrid = 400;
  double a = lo, fa = fit(lo);
  if (fa == 0.0) {
    be.n0 = lo;
    return be;
  }
  for (int i = 1; i <= kGrid; ++i) {
    const double c = lo * std::pow(hi / lo, static_cast<double>(i) / kGrid);
    const double fc = fit(c);
    if ((fa < 0.0) != (fc < 0.0) || fc == 0.0) {
      double l = a, h = c;
      for (int it = 0; it < 100 && h - l > 1e-9 * h; ++it) {
        const double m = 0.5 * (l + h);
        if ((fit(m) < 0.0) == (fa < 0.0)) l = m; else h = m;
      }
      be.n0 = 0.5 * (l + h);
      return be;
    }
    a = c;
    fa = fc;
  }
  be.note = fa > 0.0 ? "ddc slower than rpdc over the whole sampled range"
                     : "rpdc slower than ddc over the whole sampled range";
  return be;
}

}  // namespace rpdcov::harness
