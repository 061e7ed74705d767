#pragma once

// Random one-dimensional projections: uniform directions on the unit
// sphere, the sphere-integration constants C_d, and the single-projection
// distance covariance C_p C_q Omega_n(u'X, v'Y).

#include "rpdcov/dcov.hpp"
#include "rpdcov/random.hpp"
#include "rpdcov/types.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace rpdcov {

/// C_d = sqrt(pi) Gamma((d+1)/2) / Gamma(d/2), so that
/// C_d * E_u |u't| = |t| for u uniform on the unit sphere in R^d.
/// Evaluated through log-Gamma; grows like sqrt(pi d / 2).
inline double cp_constant(Eigen::Index d) {
  if (d < 1) throw DimensionError("cp_constant: dimension must be >= 1");
  if (d == 1) return 1.0;
  const double h = static_cast<double>(d) / 2.0;
  return std::sqrt(std::numbers::pi) * std::exp(std::lgamma(h + 0.5) - std::lgamma(h));
}

/// A point on the unit sphere S^{d-1}.
template <typename Scalar>
class Direction {
 public:
  Direction() = default;

  /// Normalizes `v`; throws if it has zero norm.
  explicit Direction(Vector<Scalar> v) : v_(std::move(v)) {
    const Scalar norm = v_.norm();
    if (!(norm > Scalar(0)) || !std::isfinite(norm)) throw NumericError("Direction: zero or non-finite norm");
    v_ /= norm;
  }

  const Vector<Scalar>& components() const { return v_; }
  Eigen::Index dim() const { return v_.size(); }
  Direction operator-() const {
    Direction d;
    d.v_ = -v_;
    return d;
  }

 private:
  Vector<Scalar> v_;
};

/// Normalized isotropic Gaussian draw. A zero-norm draw (probability zero)
/// is simply redrawn from the continuing stream.
template <typename Scalar = double>
Direction<Scalar> sample_unit_sphere(Eigen::Index d, Engine& engine) {
  if (d < 1) throw DimensionError("sample_unit_sphere: dimension must be >= 1");
  std::normal_distribution<Scalar> normal(Scalar(0), Scalar(1));
  Vector<Scalar> v(d);
  for (;;) {
    for (Eigen::Index j = 0; j < d; ++j) v[j] = normal(engine);
    if (v.squaredNorm() > Scalar(0)) return Direction<Scalar>(std::move(v));
  }
}

template <typename Scalar = double>
Direction<Scalar> sample_unit_sphere(Eigen::Index d, RngSeed seed) {
  Engine engine = make_engine(seed);
  return sample_unit_sphere<Scalar>(d, engine);
}

/// output[i] = <X_i, u>.
template <typename Derived>
Vector<typename Derived::Scalar> project(const Eigen::MatrixBase<Derived>& X,
                                         const Direction<typename Derived::Scalar>& u) {
  if (X.cols() != u.dim()) {
    throw DimensionError("project: direction has dimension " + std::to_string(u.dim()) +
                         " but data has " + std::to_string(X.cols()) + " columns");
  }
  return X * u.components();
}

/// C_p C_q Omega_n(u'X, v'Y) through the O(n log n) univariate path.
template <typename DerivedX, typename DerivedY>
DcovEstimate projected_dcov(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& Y,
                            const Direction<typename DerivedX::Scalar>& u,
                            const Direction<typename DerivedY::Scalar>& v) {
  detail::require_same_rows(X.rows(), Y.rows(), "projected_dcov");
  DcovEstimate e = dcov_unbiased_fast(project(X, u), project(Y, v));
  e.value *= cp_constant(X.cols()) * cp_constant(Y.cols());
  e.method = DcovMethod::projected_single;
  return e;
}

}  // namespace rpdcov
