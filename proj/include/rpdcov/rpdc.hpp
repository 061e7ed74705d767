#pragma once

// Randomly projected distance covariance (RPDC): the averaged estimator
// over K random projection pairs, and the two independence tests built on
// it (permutation reference, and a moment-matched Gamma reference).
//
// Random streams: projection k of a run with master seed s draws, in order,
// u_k, v_k, u'_k, v'_k from stream (s, k). The estimator only consumes the
// first two, so the Gamma test's averaged estimate equals rpdc_estimate for
// the same seed.

#include "rpdcov/dcov.hpp"
#include "rpdcov/projection.hpp"
#include "rpdcov/random.hpp"
#include "rpdcov/special.hpp"
#include "rpdcov/test_result.hpp"
#include "rpdcov/types.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace rpdcov {

struct RpdcConfig {
  std::int64_t k_projections = 50;
  std::uint64_t seed = 0;  // master seed; projection k uses stream (seed, k)
  double significance = 0.05;
  std::int64_t permutations = 200;

  void validate() const {
    if (k_projections < 1) throw DomainError("RpdcConfig: k_projections must be >= 1");
    if (!(significance > 0.0 && significance < 1.0)) throw DomainError("RpdcConfig: significance must lie in (0, 1)");
  }
};

/// Per-run averages over the K projections feeding the Gamma calibration.
struct ProjectionMoments {
  std::int64_t n = 0;
  std::int64_t k = 0;
  double omega_bar = 0;  // mean of C_p C_q Omega_n(u'X, v'Y)
  double s1 = 0;         // mean of C_p^2 C_q^2 Omega_n(u'X, u'X) Omega_n(v'Y, v'Y)
  double s2 = 0;         // mean of C_p a..^u / (n(n-1))
  double s3 = 0;         // mean of C_q b..^v / (n(n-1))
  double omega_x = 0;    // mean of C_p^2 Omega_n(u'X, u2'X), u2 independent of u
  double omega_y = 0;    // mean of C_q^2 Omega_n(v'Y, v2'Y)
};

namespace detail {

// Projections of every row onto a block of directions (columns of `dirs`).
// Each row goes through the same kernel, so identical rows project to
// identical values.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> project_rows(
    const Eigen::Ref<const DataMatrix<Scalar>>& X,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& dirs) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(X.rows(), dirs.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out.row(i).noalias() = X.row(i) * dirs;
  return out;
}

// Directions for projections [k0, k1): columns of u, v and (optionally)
// the companion draws u2, v2.
template <typename Scalar>
struct DirectionBlock {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> u, v, u2, v2;
};

template <typename Scalar>
DirectionBlock<Scalar> draw_direction_block(Eigen::Index p, Eigen::Index q, std::uint64_t master,
                                            std::int64_t k0, std::int64_t k1, bool companions) {
  DirectionBlock<Scalar> b;
  const Eigen::Index m = static_cast<Eigen::Index>(k1 - k0);
  b.u.resize(p, m);
  b.v.resize(q, m);
  if (companions) {
    b.u2.resize(p, m);
    b.v2.resize(q, m);
  }
  for (Eigen::Index c = 0; c < m; ++c) {
    Engine engine = make_engine(RngSeed{master, static_cast<std::uint64_t>(k0 + c)});
    b.u.col(c) = sample_unit_sphere<Scalar>(p, engine).components();
    b.v.col(c) = sample_unit_sphere<Scalar>(q, engine).components();
    if (companions) {
      b.u2.col(c) = sample_unit_sphere<Scalar>(p, engine).components();
      b.v2.col(c) = sample_unit_sphere<Scalar>(q, engine).components();
    }
  }
  return b;
}

// Projections are processed in fixed-size blocks, keeping memory O(n).
inline constexpr std::int64_t kProjectionBlock = 16;

template <typename Scalar>
void validate_pair(const Eigen::Ref<const DataMatrix<Scalar>>& X, const Eigen::Ref<const DataMatrix<Scalar>>& Y,
                   const char* what) {
  require_same_rows(X.rows(), Y.rows(), what);
  require_min_rows(X.rows(), 4, what);
  if (X.cols() < 1 || Y.cols() < 1) throw DimensionError(std::string(what) + ": empty dimension");
  require_finite(X, what);
  require_finite(Y, what);
}

template <typename Scalar>
double rpdc_average(const Eigen::Ref<const DataMatrix<Scalar>>& X, const Eigen::Ref<const DataMatrix<Scalar>>& Y,
                    std::int64_t K, std::uint64_t master) {
  const double cpq = cp_constant(X.cols()) * cp_constant(Y.cols());
  double sum = 0;
  for (std::int64_t k0 = 0; k0 < K; k0 += kProjectionBlock) {
    const std::int64_t k1 = std::min(K, k0 + kProjectionBlock);
    const auto dirs = draw_direction_block<Scalar>(X.cols(), Y.cols(), master, k0, k1, false);
    const auto px = project_rows<Scalar>(X, dirs.u);
    const auto py = project_rows<Scalar>(Y, dirs.v);
    for (Eigen::Index c = 0; c < px.cols(); ++c) {
      sum += cpq * static_cast<double>(omega_xy(distance_moments_fast(px.col(c), py.col(c))));
    }
  }
  return sum / static_cast<double>(K);
}

}  // namespace detail

/// The averaged projected estimator: mean over K independent direction
/// pairs of C_p C_q Omega_n(u_k'X, v_k'Y). Unbiased for Omega_n(X, Y);
/// O(K n log n) time.
template <typename DerivedX, typename DerivedY>
DcovEstimate rpdc_estimate(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& Y,
                           const RpdcConfig& cfg) {
  using Scalar = typename DerivedX::Scalar;
  static_assert(std::is_same_v<Scalar, typename DerivedY::Scalar>);
  cfg.validate();
  const DataMatrix<Scalar>& Xr = X.derived();
  const DataMatrix<Scalar>& Yr = Y.derived();
  detail::validate_pair<Scalar>(Xr, Yr, "rpdc_estimate");

  DcovEstimate e;
  e.value = detail::rpdc_average<Scalar>(Xr, Yr, cfg.k_projections, cfg.seed);
  e.method = DcovMethod::projected_average;
  e.n = X.rows();
  e.k_projections = cfg.k_projections;
  e.seed = cfg.seed;
  return e;
}

/// Averages of every per-projection quantity the Gamma test needs.
template <typename DerivedX, typename DerivedY>
ProjectionMoments projection_moments(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& Y,
                                     const RpdcConfig& cfg) {
  using Scalar = typename DerivedX::Scalar;
  cfg.validate();
  const DataMatrix<Scalar>& Xr = X.derived();
  const DataMatrix<Scalar>& Yr = Y.derived();
  detail::validate_pair<Scalar>(Xr, Yr, "projection_moments");

  const Eigen::Index n = X.rows();
  const double cp = cp_constant(X.cols());
  const double cq = cp_constant(Y.cols());
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
  const std::int64_t K = cfg.k_projections;

  ProjectionMoments m;
  m.n = n;
  m.k = K;
  for (std::int64_t k0 = 0; k0 < K; k0 += detail::kProjectionBlock) {
    const std::int64_t k1 = std::min(K, k0 + detail::kProjectionBlock);
    const auto dirs = detail::draw_direction_block<Scalar>(X.cols(), Y.cols(), cfg.seed, k0, k1, true);
    const auto px = detail::project_rows<Scalar>(Xr, dirs.u);
    const auto py = detail::project_rows<Scalar>(Yr, dirs.v);
    const auto px2 = detail::project_rows<Scalar>(Xr, dirs.u2);
    const auto py2 = detail::project_rows<Scalar>(Yr, dirs.v2);
    for (Eigen::Index c = 0; c < px.cols(); ++c) {
      const auto xy = distance_moments_fast(px.col(c), py.col(c));
      const auto xx2 = distance_moments_fast(px.col(c), px2.col(c));
      const auto yy2 = distance_moments_fast(py.col(c), py2.col(c));
      m.omega_bar += cp * cq * static_cast<double>(omega_xy(xy));
      m.s1 += cp * cp * cq * cq * static_cast<double>(omega_xx(xy)) * static_cast<double>(omega_yy(xy));
      m.s2 += cp * static_cast<double>(xy.total_a()) / pairs;
      m.s3 += cq * static_cast<double>(xy.total_b()) / pairs;
      m.omega_x += cp * cp * static_cast<double>(omega_xy(xx2));
      m.omega_y += cq * cq * static_cast<double>(omega_xy(yy2));
    }
  }
  const double inv_k = 1.0 / static_cast<double>(K);
  m.omega_bar *= inv_k;
  m.s1 *= inv_k;
  m.s2 *= inv_k;
  m.s3 *= inv_k;
  m.omega_x *= inv_k;
  m.omega_y *= inv_k;
  return m;
}

/// Moment-matched Gamma law for the null statistic n * omega_bar + s2 * s3:
/// mean s2 s3 and variance 2 D, with
///   D = (K-1)/K * omega_x * omega_y + s1 / K.
/// Throws DegenerateData when either moment is not positive.
inline GammaParams gamma_params_from_projections(const ProjectionMoments& m) {
  if (m.k < 1) throw DomainError("gamma_params_from_projections: no projections");
  const double k = static_cast<double>(m.k);
  const double mean = m.s2 * m.s3;
  const double d = (k - 1.0) / k * m.omega_x * m.omega_y + m.s1 / k;
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw DegenerateData("gamma_params_from_projections: zero pairwise-distance sum (constant sample)");
  }
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw DegenerateData("gamma_params_from_projections: non-positive variance estimate");
  }
  return GammaParams{0.5 * mean * mean / d, 0.5 * mean / d};
}

namespace detail {

inline TestConfigEcho echo(const RpdcConfig& cfg, Eigen::Index n, Eigen::Index p, Eigen::Index q) {
  TestConfigEcho e;
  e.n = n;
  e.p = p;
  e.q = q;
  e.significance = cfg.significance;
  e.k_projections = cfg.k_projections;
  e.seed = cfg.seed;
  return e;
}

inline constexpr std::uint64_t kPermutationTag = 0x7065726d75746174ULL;

}  // namespace detail

/// Independence test against a moment-matched Gamma null.
/// Rejects when n * omega_bar + s2 * s3 exceeds the (1 - alpha) Gamma
/// quantile. Degenerate samples yield a non-rejecting, flagged result.
template <typename DerivedX, typename DerivedY>
TestResult gamma_test(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& Y,
                      const RpdcConfig& cfg) {
  TestResult r;
  r.method = TestMethod::rpdc_gamma;
  r.config = detail::echo(cfg, X.rows(), X.cols(), Y.cols());

  const ProjectionMoments m = projection_moments(X, Y, cfg);
  r.statistic = static_cast<double>(m.n) * m.omega_bar + m.s2 * m.s3;
  try {
    const GammaParams g = gamma_params_from_projections(m);
    r.gamma = g;
    r.threshold = gamma_quantile(g, 1.0 - cfg.significance);
    r.reject = r.statistic > *r.threshold;
  } catch (const DegenerateData& e) {
    r.degenerate = true;
    r.reject = false;
    r.note = e.what();
  }
  return r;
}

/// Permutation independence test. Replicate l (1..L) permutes the rows of
/// Y with stream (derive_seed(seed, tag), l) and re-runs the estimator with
/// fresh directions from master derive_seed(seed, l). The p-value is the
/// right-tail count p = (1 + #{V_l >= observed}) / (1 + L).
template <typename DerivedX, typename DerivedY>
TestResult permutation_test(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& Y,
                            const RpdcConfig& cfg) {
  using Scalar = typename DerivedX::Scalar;
  cfg.validate();
  if (cfg.permutations < 1) throw DomainError("permutation_test: permutations must be >= 1");
  const DataMatrix<Scalar>& Xr = X.derived();
  const DataMatrix<Scalar>& Yr = Y.derived();
  detail::validate_pair<Scalar>(Xr, Yr, "permutation_test");

  TestResult r;
  r.method = TestMethod::rpdc_permutation;
  r.config = detail::echo(cfg, X.rows(), X.cols(), Y.cols());
  r.config.permutations = cfg.permutations;

  const double observed = detail::rpdc_average<Scalar>(Xr, Yr, cfg.k_projections, cfg.seed);
  r.statistic = observed;

  const std::uint64_t perm_master = derive_seed(cfg.seed, detail::kPermutationTag);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(Yr.rows()));
  DataMatrix<Scalar> Yp(Yr.rows(), Yr.cols());
  std::int64_t exceed = 0;
  for (std::int64_t l = 1; l <= cfg.permutations; ++l) {
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    Engine engine = make_engine(RngSeed{perm_master, static_cast<std::uint64_t>(l)});
    std::shuffle(perm.begin(), perm.end(), engine);
    for (Eigen::Index i = 0; i < Yr.rows(); ++i) Yp.row(i) = Yr.row(perm[static_cast<std::size_t>(i)]);
    const double v = detail::rpdc_average<Scalar>(Xr, Yp, cfg.k_projections,
                                                  derive_seed(cfg.seed, static_cast<std::uint64_t>(l)));
    if (v >= observed) ++exceed;
  }
  r.p_value = static_cast<double>(1 + exceed) / static_cast<double>(1 + cfg.permutations);
  r.reject = *r.p_value <= cfg.significance;
  return r;
}

}  // namespace rpdcov
