#include "rpdcov/dcov.hpp"
#include "rpdcov/spectrum.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using rpdcov::MatrixXd;

namespace {

double grand_distance_sum(const MatrixXd& X) { return oracle::distance_matrix(X).sum(); }

rpdcov::Spectrum<double> spectrum_of(const MatrixXd& X) {
  return rpdcov::empirical_spectrum(rpdcov::centered_kernel_matrix(X));
}

rpdcov::Spectrum<double> spec(std::initializer_list<double> v) {
  rpdcov::Spectrum<double> s;
  s.eigenvalues = Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Eigen::Index>(v.size()));
  return s;
}

}  // namespace

TEST_CASE("identical rows give the zero kernel and spectrum") {
  const MatrixXd X = MatrixXd::Constant(12, 3, -0.7);
  const auto k = rpdcov::centered_kernel_matrix(X);
  CHECK(k.entries.cwiseAbs().maxCoeff() == 0.0);
  CHECK(k.source_dim == 3);
  const auto s = rpdcov::empirical_spectrum(k);
  CHECK(s.eigenvalues.size() == 12);
  CHECK(s.eigenvalues.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("three points on a line") {
  MatrixXd X(3, 1);
  X << 0, 1, 2;
  Eigen::MatrixXd expected(3, 3);
  expected << 10, -2, -8,
              -2, 4, -2,
              -8, -2, 10;
  expected /= 9.0;
  const auto k = rpdcov::centered_kernel_matrix(X);
  CHECK((k.entries - expected).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("kernel matrix is symmetric, double centered and PSD") {
  std::mt19937_64 rng(1);
  for (int d : {1, 2, 7}) {
    const MatrixXd X = oracle::normal_matrix(80, d, rng);
    const auto k = rpdcov::centered_kernel_matrix(X);
    const double scale = 80.0 * k.entries.cwiseAbs().maxCoeff();
    CHECK((k.entries - k.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(k.entries.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-8 * scale);
    CHECK(k.entries.colwise().sum().cwiseAbs().maxCoeff() <= 1e-8 * scale);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k.entries);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * eig.eigenvalues().maxCoeff());
    const auto s = rpdcov::empirical_spectrum(k);
    for (Eigen::Index i = 1; i < s.eigenvalues.size(); ++i) CHECK(s.eigenvalues[i] <= s.eigenvalues[i - 1]);
    CHECK(s.eigenvalues.minCoeff() >= 0.0);
  }
}

TEST_CASE("eigenvalue sum equals the mean pairwise distance") {
  std::mt19937_64 rng(2);
  for (int d : {1, 3, 10}) {
    const MatrixXd X = oracle::uniform_matrix(150, d, rng);
    const double n = 150.0;
    const double target = grand_distance_sum(X) / (n * n);
    const double total = spectrum_of(X).sum();
    CHECK(std::fabs(total - target) <= 1e-10 * target);
    const auto k = rpdcov::centered_kernel_matrix(X);
    CHECK(std::fabs(k.entries.trace() / n - target) <= 1e-10 * target);
  }
}

TEST_CASE("normal sample: eigenvalue sum near E|Z - Z'|") {
  std::mt19937_64 rng(3);
  const MatrixXd x = oracle::normal_matrix(500, 1, rng);
  const double expected = 2.0 / std::sqrt(std::numbers::pi);
  CHECK(std::fabs(spectrum_of(x).sum() - expected) <= 0.05 * expected);
}

TEST_CASE("translation invariance and scale law") {
  std::mt19937_64 rng(4);
  const MatrixXd X = oracle::normal_matrix(60, 4, rng);
  Eigen::RowVectorXd shift(4);
  shift << 3.0, -10.0, 0.5, 1e3;
  const MatrixXd Xs = X.rowwise() + shift;
  const auto k = rpdcov::centered_kernel_matrix(X);
  const auto ks = rpdcov::centered_kernel_matrix(Xs);
  CHECK((k.entries - ks.entries).cwiseAbs().maxCoeff() <= 1e-10);

  const auto s = spectrum_of(X);
  for (double a : {0.01, 2.5, 40.0}) {
    const auto sa = spectrum_of(MatrixXd(a * X));
    CHECK((sa.eigenvalues - a * s.eigenvalues).cwiseAbs().maxCoeff() <= 1e-10 * a * s.eigenvalues[0]);
  }
}

TEST_CASE("tensor spectrum enumerates the largest products") {
  const auto t = rpdcov::tensor_spectrum(spec({2, 1}), spec({3, 1}), 4);
  REQUIRE(t.eigenvalues.size() == 4);
  CHECK(t.eigenvalues[0] == 6.0);
  CHECK(t.eigenvalues[1] == 3.0);
  CHECK(t.eigenvalues[2] == 2.0);
  CHECK(t.eigenvalues[3] == 1.0);
  CHECK(rpdcov::tensor_spectrum(spec({2, 1}), spec({3, 1}), 10).eigenvalues.size() == 4);
  CHECK(rpdcov::tensor_spectrum(spec({2, 1}), spec({3, 1}), 2).eigenvalues.size() == 2);

  CHECK_THROWS_AS(rpdcov::tensor_spectrum(rpdcov::Spectrum<double>{}, spec({1}), 3), rpdcov::SizeError);
  CHECK_THROWS_AS(rpdcov::tensor_spectrum(spec({1}), spec({1}), 0), rpdcov::DomainError);
}

TEST_CASE("tensor spectrum matches brute-force products") {
  std::mt19937_64 rng(5);
  const auto sx = spectrum_of(oracle::normal_matrix(25, 2, rng));
  const auto sy = spectrum_of(oracle::uniform_matrix(18, 3, rng));
  std::vector<double> all;
  for (Eigen::Index i = 0; i < sx.eigenvalues.size(); ++i) {
    for (Eigen::Index j = 0; j < sy.eigenvalues.size(); ++j) all.push_back(sx.eigenvalues[i] * sy.eigenvalues[j]);
  }
  std::sort(all.rbegin(), all.rend());
  const auto t = rpdcov::tensor_spectrum(sx, sy, 25 * 18);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(t.eigenvalues[static_cast<Eigen::Index>(i)] == all[i]);
  CHECK(t.sum() == doctest::Approx(sx.sum() * sy.sum()).epsilon(1e-12));
  CHECK(t.sum_squares() == doctest::Approx(sx.sum_squares() * sy.sum_squares()).epsilon(1e-12));
}

TEST_CASE("squared tensor sum tracks the U-statistic self terms") {
  for (int d : {1, 2}) {
    std::mt19937_64 rng(6 + static_cast<std::uint64_t>(d));
    const MatrixXd X = oracle::normal_matrix(500, d, rng);
    const MatrixXd Y = oracle::normal_matrix(500, d, rng);
    const double lhs = spectrum_of(X).sum_squares() * spectrum_of(Y).sum_squares();
    const auto m = rpdcov::distance_moments_bruteforce(X, Y);
    const double rhs = rpdcov::omega_xx(m) * rpdcov::omega_yy(m);
    CHECK(std::fabs(lhs - rhs) <= 0.05 * rhs);
  }
}

TEST_CASE("gamma tail agrees with the simulated weighted chi-square") {
  std::mt19937_64 rng(8);
  const MatrixXd X = oracle::uniform_matrix(300, 3, rng);
  const MatrixXd Y = oracle::uniform_matrix(300, 3, rng);
  const auto sx = spectrum_of(X);
  const auto sy = spectrum_of(Y);
  const double sum_w = sx.sum() * sy.sum();
  const double sum_w2 = sx.sum_squares() * sy.sum_squares();
  const double gamma_q = rpdcov::gamma_quantile(rpdcov::gamma_from_weight_moments(sum_w, sum_w2), 0.95);

  const auto top = rpdcov::tensor_spectrum(sx, sy, 300);
  const double sim_q = rpdcov::simulate_weighted_chisq_quantile(top.eigenvalues, 0.95, 20000, 1, sum_w - top.sum());
  CHECK(std::fabs(gamma_q - sim_q) <= 0.1 * sim_q);
}

TEST_CASE("weighted chi-square simulation basics") {
  Eigen::VectorXd w(1);
  w << 1.0;
  const double q = rpdcov::simulate_weighted_chisq_quantile(w, 0.95, 200000, 3);
  CHECK(q == doctest::Approx(3.841458820694124).epsilon(0.02));
  CHECK(rpdcov::simulate_weighted_chisq_quantile(w, 0.5, 1000, 4) ==
        rpdcov::simulate_weighted_chisq_quantile(w, 0.5, 1000, 4));
  CHECK_THROWS_AS(rpdcov::simulate_weighted_chisq_quantile(w, 0.95, 0, 3), rpdcov::DomainError);
  CHECK_THROWS_AS(rpdcov::gamma_from_weight_moments(0.0, 1.0), rpdcov::DegenerateData);
}
