#pragma once

// Reference independence tests: direct distance covariance with a Gamma
// null (DDC), Wilks Lambda, and the Puri-Sen rank analogue.

#include "rpdcov/dcov.hpp"
#include "rpdcov/special.hpp"
#include "rpdcov/test_result.hpp"
#include "rpdcov/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

namespace rpdcov {

/// Sample covariance (or rank-correlation) blocks of the stacked (X, Y).
template <typename Scalar>
struct CovBlocks {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> s11, s22, s12;
};

template <typename DerivedX, typename DerivedY>
CovBlocks<typename DerivedX::Scalar> covariance_blocks(const Eigen::MatrixBase<DerivedX>& X,
                                                        const Eigen::MatrixBase<DerivedY>& Y) {
  using Scalar = typename DerivedX::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  detail::require_same_rows(X.rows(), Y.rows(), "covariance_blocks");
  const Mat xc = X.rowwise() - X.colwise().mean();
  const Mat yc = Y.rowwise() - Y.colwise().mean();
  const Scalar denom = static_cast<Scalar>(X.rows() - 1);
  CovBlocks<Scalar> b;
  b.s11 = (xc.transpose() * xc) / denom;
  b.s22 = (yc.transpose() * yc) / denom;
  b.s12 = (xc.transpose() * yc) / denom;
  return b;
}

/// Average ranks (1-based; ties share the mean of their positions).
template <typename Derived>
Vector<typename Derived::Scalar> average_ranks(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = v.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return v(a) < v(b); });
  Vector<Scalar> ranks(n);
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j + 1 < n && v(order[j + 1]) == v(order[i])) ++j;
    const Scalar r = static_cast<Scalar>(i + j) / Scalar(2) + Scalar(1);
    for (Eigen::Index k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

/// Spearman rank-correlation blocks. Throws NumericError for a constant
/// column, which has no rank information.
template <typename DerivedX, typename DerivedY>
CovBlocks<typename DerivedX::Scalar> spearman_blocks(const Eigen::MatrixBase<DerivedX>& X,
                                                      const Eigen::MatrixBase<DerivedY>& Y) {
  using Scalar = typename DerivedX::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  detail::require_same_rows(X.rows(), Y.rows(), "spearman_blocks");
  const auto rank_columns = [](const auto& M, const char* name) {
    Mat r(M.rows(), M.cols());
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      r.col(j) = average_ranks(M.col(j));
      if ((r.col(j).array() == r(0, j)).all()) {
        throw NumericError(std::string("puri_sen_test: column ") + std::to_string(j) + " of " + name +
                           " is constant (rank-degenerate)");
      }
    }
    return r;
  };
  const Mat rx = rank_columns(X, "X");
  const Mat ry = rank_columns(Y, "Y");
  CovBlocks<Scalar> c = covariance_blocks(rx, ry);
  const Vector<Scalar> sx = c.s11.diagonal().cwiseSqrt().cwiseInverse();
  const Vector<Scalar> sy = c.s22.diagonal().cwiseSqrt().cwiseInverse();
  c.s11 = sx.asDiagonal() * c.s11 * sx.asDiagonal();
  c.s22 = sy.asDiagonal() * c.s22 * sy.asDiagonal();
  c.s12 = sx.asDiagonal() * c.s12 * sy.asDiagonal();
  return c;
}

namespace detail {

template <typename Scalar>
Eigen::LLT<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> checked_cholesky(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& s, const char* block) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> eig(
      s, Eigen::EigenvaluesOnly);
  const Scalar lo = eig.eigenvalues().minCoeff();
  const Scalar hi = eig.eigenvalues().maxCoeff();
  const Scalar cond = lo > Scalar(0) ? hi / lo : std::numeric_limits<Scalar>::infinity();
  Eigen::LLT<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> llt(s);
  if (llt.info() != Eigen::Success || !(cond < Scalar(1e12))) {
    std::ostringstream msg;
    msg << "singular covariance block " << block << " (condition number " << cond << ")";
    throw NumericError(msg.str());
  }
  return llt;
}

// -(n - (p+q+3)/2) log det(I - S22^-1 S21 S11^-1 S12), via the canonical
// correlations: singular values of L11^-1 S12 L22^-T.
template <typename Scalar>
double bartlett_statistic(const CovBlocks<Scalar>& b, Eigen::Index n) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto l11 = checked_cholesky<Scalar>(b.s11, "S11");
  const auto l22 = checked_cholesky<Scalar>(b.s22, "S22");
  Mat m = l11.matrixL().solve(b.s12);
  m = l22.matrixL().solve(m.transpose()).transpose();
  const Vector<Scalar> rho = Eigen::JacobiSVD<Mat>(m).singularValues();
  double log_det = 0;
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    const double r2 = static_cast<double>(rho[i]) * static_cast<double>(rho[i]);
    log_det += std::log(std::max(1.0 - r2, std::numeric_limits<double>::min()));
  }
  const double p = static_cast<double>(b.s11.rows());
  const double q = static_cast<double>(b.s22.rows());
  return -(static_cast<double>(n) - 0.5 * (p + q + 3.0)) * log_det;
}

inline TestResult chi_squared_result(double w, Eigen::Index n, Eigen::Index p, Eigen::Index q, double alpha,
                                     TestMethod method) {
  TestResult r;
  r.method = method;
  r.statistic = w;
  r.threshold = chi_squared_quantile(static_cast<double>(p * q), 1.0 - alpha);
  r.reject = r.statistic > *r.threshold;
  r.config.n = n;
  r.config.p = p;
  r.config.q = q;
  r.config.significance = alpha;
  return r;
}

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("significance must lie in (0, 1)");
}

template <typename DerivedX, typename DerivedY>
void check_bartlett_inputs(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& Y,
                           const char* what) {
  require_same_rows(X.rows(), Y.rows(), what);
  if (X.cols() < 1 || Y.cols() < 1) throw DimensionError(std::string(what) + ": empty dimension");
  if (X.rows() <= X.cols() + Y.cols() + 3) {
    throw SizeError(std::string(what) + ": need n > p + q + 3");
  }
  require_finite(X, what);
  require_finite(Y, what);
}

}  // namespace detail

/// Direct distance covariance test. Statistic n * Omega_n + lambda1 with
/// lambda1 = a.. b.. / (n(n-1))^2 estimating E|X-X'| E|Y-Y'|; the Gamma
/// null matches mean lambda1 and variance 2 Omega_n(X,X) Omega_n(Y,Y).
template <typename DerivedX, typename DerivedY>
TestResult ddc_gamma_test(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& Y,
                          double alpha) {
  detail::check_alpha(alpha);
  const auto m = distance_moments_bruteforce(X, Y);
  const double n = static_cast<double>(m.n);
  const double pairs = n * (n - 1.0);
  const double lambda1 = static_cast<double>(m.total_a()) * static_cast<double>(m.total_b()) / (pairs * pairs);
  const double lambda_sq = static_cast<double>(omega_xx(m)) * static_cast<double>(omega_yy(m));

  TestResult r;
  r.method = TestMethod::ddc_gamma;
  r.statistic = n * static_cast<double>(omega_xy(m)) + lambda1;
  r.config.n = m.n;
  r.config.p = X.cols();
  r.config.q = Y.cols();
  r.config.significance = alpha;
  if (!(lambda1 > 0.0) || !(lambda_sq > 0.0) || !std::isfinite(lambda_sq)) {
    r.degenerate = true;
    r.note = "ddc_gamma_test: zero pairwise-distance sum or non-positive variance estimate";
    return r;
  }
  const GammaParams g{0.5 * lambda1 * lambda1 / lambda_sq, 0.5 * lambda1 / lambda_sq};
  r.gamma = g;
  r.threshold = gamma_quantile(g, 1.0 - alpha);
  r.reject = r.statistic > *r.threshold;
  return r;
}

/// Wilks Lambda likelihood-ratio test with Bartlett's chi^2(pq) calibration.
template <typename DerivedX, typename DerivedY>
TestResult wilks_lambda_test(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& Y,
                             double alpha) {
  detail::check_alpha(alpha);
  detail::check_bartlett_inputs(X, Y, "wilks_lambda_test");
  const double w = detail::bartlett_statistic(covariance_blocks(X, Y), X.rows());
  return detail::chi_squared_result(w, X.rows(), X.cols(), Y.cols(), alpha, TestMethod::wilks);
}

/// Puri-Sen test: Wilks' statistic on Spearman rank-correlation blocks.
template <typename DerivedX, typename DerivedY>
TestResult puri_sen_test(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& Y,
                         double alpha) {
  detail::check_alpha(alpha);
  detail::check_bartlett_inputs(X, Y, "puri_sen_test");
  const double w = detail::bartlett_statistic(spearman_blocks(X, Y), X.rows());
  return detail::chi_squared_result(w, X.rows(), X.cols(), Y.cols(), alpha, TestMethod::puri_sen);
}

}  // namespace rpdcov
