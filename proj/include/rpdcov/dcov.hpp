#pragma once

// Unbiased sample distance covariance (the U-centered estimator Omega_n).
//
//   Omega_n = S_ab / (n(n-3)) - 2 sum_i a_i. b_i. / (n(n-2)(n-3))
//             + a.. b.. / (n(n-1)(n-2)(n-3))
//
// with a_ij = |X_i - X_j|, b_ij = |Y_i - Y_j|, S_ab = sum_{i != j} a_ij b_ij,
// a_i. the row sums and a.. the grand sum. Three routes are provided:
//
//   * dcov_unbiased_fast        univariate, O(n log n) time, O(n) memory
//   * dcov_unbiased_bruteforce  any dimension, O(n^2 (p+q)) time, O(n) memory
//   * h4_kernel                 the symmetric four-point kernel (n == 4)

#include "rpdcov/types.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <numeric>
#include <vector>

namespace rpdcov {

template <typename Scalar>
struct PairwiseSums {
  Vector<Scalar> row_sums;  // a_i. = sum_l |x_i - x_l|
  Scalar total = 0;         // a..  = sum of row_sums, left to right
};

// Sums that determine Omega_n for a pair of samples (and for each sample
// paired with itself). Produced by both the fast and the brute-force routes.
template <typename Scalar>
struct DistanceMoments {
  Eigen::Index n = 0;
  Scalar sum_ab = 0;  // sum_{i != j} a_ij b_ij
  Scalar sum_aa = 0;  // sum_{i != j} a_ij^2
  Scalar sum_bb = 0;  // sum_{i != j} b_ij^2
  Vector<Scalar> row_a;
  Vector<Scalar> row_b;

  Scalar total_a() const { return row_a.sum(); }
  Scalar total_b() const { return row_b.sum(); }
};

/// Combines the three U-centering terms. `n` must be at least 4.
template <typename Scalar>
Scalar omega_from_sums(Eigen::Index n_obs, Scalar sum_cross, Scalar sum_row_products,
                       Scalar total_a, Scalar total_b) {
  const Scalar n = static_cast<Scalar>(n_obs);
  return sum_cross / (n * (n - 3)) -
         Scalar(2) * sum_row_products / (n * (n - 2) * (n - 3)) +
         total_a * total_b / (n * (n - 1) * (n - 2) * (n - 3));
}

namespace detail {

// Values in ascending order with their original positions. Ties keep
// index order, which is what a stable sort would give.
template <typename Scalar>
struct SortedSample {
  std::vector<Scalar> values;
  std::vector<Eigen::Index> order;
};

template <typename Scalar>
SortedSample<Scalar> sort_sample(const Vector<Scalar>& x) {
  const auto n = static_cast<std::size_t>(x.size());
  std::vector<std::pair<Scalar, Eigen::Index>> keyed(n);
  for (std::size_t i = 0; i < n; ++i) keyed[i] = {x[static_cast<Eigen::Index>(i)], static_cast<Eigen::Index>(i)};
  std::sort(keyed.begin(), keyed.end());
  SortedSample<Scalar> s;
  s.values.resize(n);
  s.order.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.values[i] = keyed[i].first;
    s.order[i] = keyed[i].second;
  }
  return s;
}

// Row sums from a sorted sample. The left and right partial sums are built
// from consecutive gaps, so every term is nonnegative and ties contribute
// exactly zero.
template <typename Scalar>
PairwiseSums<Scalar> pairwise_sums_sorted(const SortedSample<Scalar>& s) {
  const auto n = static_cast<Eigen::Index>(s.order.size());
  const auto& v = s.values;
  PairwiseSums<Scalar> out;
  out.row_sums.setZero(n);
  if (n == 0) return out;

  std::vector<Scalar> left(static_cast<std::size_t>(n), Scalar(0));
  for (Eigen::Index k = 1; k < n; ++k) left[k] = left[k - 1] + static_cast<Scalar>(k) * (v[k] - v[k - 1]);
  Scalar right = 0;
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    if (k + 1 < n) right += static_cast<Scalar>(n - 1 - k) * (v[k + 1] - v[k]);
    out.row_sums[s.order[k]] = left[k] + right;
  }
  out.total = 0;
  for (Eigen::Index i = 0; i < n; ++i) out.total += out.row_sums[i];
  return out;
}

// sum_{i<j} |x_i - x_j| |y_i - y_j| in O(n log n).
//
// Observations are laid out in x order, so for positions i < j the x
// distance is xs[j] - xs[i]. A bottom-up merge sort on y then visits every
// pair exactly once, when i sits in a left run and j in the adjacent right
// run. When the right element j is emitted, the left elements already
// emitted satisfy y_i <= y_j and the remaining ones y_i > y_j; running sums
// of x, y and x*y over both groups give the pair contributions in O(1).
template <typename Scalar>
Scalar cross_distance_sum(std::vector<Scalar> xs, std::vector<Scalar> ys) {
  const std::size_t n = xs.size();
  std::vector<Scalar> xbuf(n), ybuf(n);
  Scalar acc = 0;

  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      if (mid >= hi) {
        std::copy(xs.begin() + lo, xs.begin() + hi, xbuf.begin() + lo);
        std::copy(ys.begin() + lo, ys.begin() + hi, ybuf.begin() + lo);
        continue;
      }

      Scalar left_x = 0, left_y = 0, left_xy = 0;
      for (std::size_t i = lo; i < mid; ++i) {
        left_x += xs[i];
        left_y += ys[i];
        left_xy += xs[i] * ys[i];
      }
      const auto left_count = static_cast<Scalar>(mid - lo);

      Scalar emit_x = 0, emit_y = 0, emit_xy = 0, emit_count = 0;
      std::size_t i = lo, j = mid, out = lo;
      while (j < hi) {
        if (i < mid && ys[i] <= ys[j]) {
          emit_x += xs[i];
          emit_y += ys[i];
          emit_xy += xs[i] * ys[i];
          emit_count += 1;
          xbuf[out] = xs[i];
          ybuf[out] = ys[i];
          ++out;
          ++i;
          continue;
        }
        const Scalar xj = xs[j], yj = ys[j];
        const Scalar rest_x = left_x - emit_x;
        const Scalar rest_y = left_y - emit_y;
        const Scalar rest_xy = left_xy - emit_xy;
        const Scalar rest_count = left_count - emit_count;
        // emitted: (xj - xi)(yj - yi); remaining: (xj - xi)(yi - yj)
        acc += emit_count * xj * yj - xj * emit_y - yj * emit_x + emit_xy;
        acc += xj * rest_y - rest_count * xj * yj - rest_xy + yj * rest_x;
        xbuf[out] = xj;
        ybuf[out] = yj;
        ++out;
        ++j;
      }
      for (; i < mid; ++i, ++out) {
        xbuf[out] = xs[i];
        ybuf[out] = ys[i];
      }
    }
    std::swap(xs, xbuf);
    std::swap(ys, ybuf);
  }
  return acc;
}

template <typename Scalar>
Vector<Scalar> to_vector(const Eigen::Ref<const Vector<Scalar>>& v) {
  return Vector<Scalar>(v);
}

}  // namespace detail

/// Row sums and grand sum of the absolute pairwise differences of `x`.
/// Stable sort plus gap accumulation; O(n log n).
template <typename Derived>
PairwiseSums<typename Derived::Scalar> pairwise_sums_fast(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  static_assert(std::is_floating_point_v<Scalar>);
  const Vector<Scalar> v = x.derived().reshaped();
  detail::require_min_rows(v.size(), 2, "pairwise_sums_fast");
  detail::require_finite(v, "pairwise_sums_fast");
  return detail::pairwise_sums_sorted(detail::sort_sample(v));
}

/// All sums needed for Omega_n(x, y), Omega_n(x, x) and Omega_n(y, y) of two
/// univariate samples.
template <typename DerivedX, typename DerivedY>
DistanceMoments<typename DerivedX::Scalar> distance_moments_fast(
    const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  static_assert(std::is_floating_point_v<Scalar>);
  static_assert(std::is_same_v<Scalar, typename DerivedY::Scalar>);
  const Vector<Scalar> xv = x.derived().reshaped();
  const Vector<Scalar> yv = y.derived().reshaped();
  detail::require_same_rows(xv.size(), yv.size(), "dcov_unbiased_fast");
  detail::require_min_rows(xv.size(), 4, "dcov_unbiased_fast");
  detail::require_finite(xv, "dcov_unbiased_fast");
  detail::require_finite(yv, "dcov_unbiased_fast");

  const auto n = xv.size();
  const auto xsorted = detail::sort_sample(xv);
  const auto ysorted = detail::sort_sample(yv);
  auto xsums = detail::pairwise_sums_sorted(xsorted);
  auto ysums = detail::pairwise_sums_sorted(ysorted);

  // Shift by an observed value (the median) so ties and constants stay
  // exactly representable.
  const auto mid = static_cast<std::size_t>(n / 2);
  const Scalar xshift = xsorted.values[mid];
  const Scalar yshift = ysorted.values[mid];
  std::vector<Scalar> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    xs[k] = xsorted.values[k] - xshift;
    ys[k] = yv[xsorted.order[k]] - yshift;
  }

  DistanceMoments<Scalar> m;
  m.n = n;
  m.sum_ab = Scalar(2) * detail::cross_distance_sum(xs, ys);

  // sum_{i != j} (x_i - x_j)^2 = 2 n sum x^2 - 2 (sum x)^2, on shifted data
  Scalar sx = 0, sxx = 0, sy = 0, syy = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    sx += xs[k];
    sxx += xs[k] * xs[k];
    sy += ys[k];
    syy += ys[k] * ys[k];
  }
  const Scalar nn = static_cast<Scalar>(n);
  m.sum_aa = Scalar(2) * (nn * sxx - sx * sx);
  m.sum_bb = Scalar(2) * (nn * syy - sy * sy);
  m.row_a = std::move(xsums.row_sums);
  m.row_b = std::move(ysums.row_sums);
  return m;
}

template <typename Scalar>
Scalar omega_xy(const DistanceMoments<Scalar>& m) {
  return omega_from_sums(m.n, m.sum_ab, m.row_a.dot(m.row_b), m.total_a(), m.total_b());
}

template <typename Scalar>
Scalar omega_xx(const DistanceMoments<Scalar>& m) {
  const Scalar ta = m.total_a();
  return omega_from_sums(m.n, m.sum_aa, m.row_a.squaredNorm(), ta, ta);
}

template <typename Scalar>
Scalar omega_yy(const DistanceMoments<Scalar>& m) {
  const Scalar tb = m.total_b();
  return omega_from_sums(m.n, m.sum_bb, m.row_b.squaredNorm(), tb, tb);
}

/// Omega_n of two univariate samples in O(n log n) time and O(n) memory.
template <typename DerivedX, typename DerivedY>
DcovEstimate dcov_unbiased_fast(const Eigen::MatrixBase<DerivedX>& x,
                                const Eigen::MatrixBase<DerivedY>& y) {
  if (x.cols() != 1 && x.rows() != 1) {
    throw DimensionError("dcov_unbiased_fast: x is multivariate (" +
                         std::to_string(x.cols()) + " columns); use the brute-force or projected estimator");
  }
  if (y.cols() != 1 && y.rows() != 1) {
    throw DimensionError("dcov_unbiased_fast: y is multivariate (" +
                         std::to_string(y.cols()) + " columns); use the brute-force or projected estimator");
  }
  const auto m = distance_moments_fast(x, y);
  DcovEstimate e;
  e.value = static_cast<double>(omega_xy(m));
  e.method = DcovMethod::fast_univariate;
  e.n = m.n;
  return e;
}

namespace detail {

// Streams all pairs i < j once. Rows are processed in tiles so that a tile
// of X and Y rows stays cache resident while every later row is visited.
template <typename Scalar>
DistanceMoments<Scalar> distance_moments_bruteforce(
    const Eigen::Ref<const DataMatrix<Scalar>>& X, const Eigen::Ref<const DataMatrix<Scalar>>& Y) {
  const Eigen::Index n = X.rows();
  DistanceMoments<Scalar> m;
  m.n = n;
  m.row_a.setZero(n);
  m.row_b.setZero(n);

  const Eigen::Index row_bytes = (X.cols() + Y.cols()) * static_cast<Eigen::Index>(sizeof(Scalar));
  const Eigen::Index tile = std::clamp<Eigen::Index>((128 * 1024) / std::max<Eigen::Index>(row_bytes, 1), 1, 256);

  Scalar sab = 0, saa = 0, sbb = 0;
  for (Eigen::Index i0 = 0; i0 < n; i0 += tile) {
    const Eigen::Index i1 = std::min(i0 + tile, n);
    for (Eigen::Index j = i0 + 1; j < n; ++j) {
      const auto xj = X.row(j);
      const auto yj = Y.row(j);
      const Eigen::Index iend = std::min(i1, j);
      for (Eigen::Index i = i0; i < iend; ++i) {
        const Scalar a = std::sqrt((X.row(i) - xj).squaredNorm());
        const Scalar b = std::sqrt((Y.row(i) - yj).squaredNorm());
        sab += a * b;
        saa += a * a;
        sbb += b * b;
        m.row_a[i] += a;
        m.row_a[j] += a;
        m.row_b[i] += b;
        m.row_b[j] += b;
      }
    }
  }
  m.sum_ab = Scalar(2) * sab;
  m.sum_aa = Scalar(2) * saa;
  m.sum_bb = Scalar(2) * sbb;
  return m;
}

}  // namespace detail

/// Literal O(n^2 (p+q)) evaluation for multivariate samples. Serves as the
/// oracle for every faster route and as the direct (DDC) estimator.
template <typename DerivedX, typename DerivedY>
DistanceMoments<typename DerivedX::Scalar> distance_moments_bruteforce(
    const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& Y) {
  using Scalar = typename DerivedX::Scalar;
  static_assert(std::is_floating_point_v<Scalar>);
  detail::require_same_rows(X.rows(), Y.rows(), "dcov_unbiased_bruteforce");
  detail::require_min_rows(X.rows(), 4, "dcov_unbiased_bruteforce");
  if (X.cols() < 1 || Y.cols() < 1) throw DimensionError("dcov_unbiased_bruteforce: empty dimension");
  detail::require_finite(X, "dcov_unbiased_bruteforce");
  detail::require_finite(Y, "dcov_unbiased_bruteforce");
  return detail::distance_moments_bruteforce<Scalar>(X.derived(), Y.derived());
}

template <typename DerivedX, typename DerivedY>
DcovEstimate dcov_unbiased_bruteforce(const Eigen::MatrixBase<DerivedX>& X,
                                      const Eigen::MatrixBase<DerivedY>& Y) {
  const auto m = distance_moments_bruteforce(X, Y);
  DcovEstimate e;
  e.value = static_cast<double>(omega_xy(m));
  e.method = DcovMethod::bruteforce;
  e.n = m.n;
  return e;
}

/// The symmetric four-point kernel whose average over all 4-subsets is
/// Omega_n. Rows of `X4` and `Y4` are the four paired observations.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar h4_kernel(const Eigen::MatrixBase<DerivedX>& X4,
                                    const Eigen::MatrixBase<DerivedY>& Y4) {
  using Scalar = typename DerivedX::Scalar;
  if (X4.rows() != 4 || Y4.rows() != 4) {
    throw SizeError("h4_kernel: exactly four observations required, got " +
                    std::to_string(X4.rows()) + " and " + std::to_string(Y4.rows()));
  }
  detail::require_finite(X4, "h4_kernel");
  detail::require_finite(Y4, "h4_kernel");

  std::array<std::array<Scalar, 4>, 4> a{}, b{};
  for (int j = 1; j < 4; ++j) {
    for (int i = 0; i < j; ++i) {
      a[i][j] = a[j][i] = std::sqrt((X4.row(i) - X4.row(j)).squaredNorm());
      b[i][j] = b[j][i] = std::sqrt((Y4.row(i) - Y4.row(j)).squaredNorm());
    }
  }
  Scalar cross = 0, sum_a = 0, sum_b = 0, rows = 0;
  std::array<Scalar, 4> ra{}, rb{};
  for (int j = 1; j < 4; ++j) {
    for (int i = 0; i < j; ++i) {
      cross += a[i][j] * b[i][j];
      ra[i] += a[i][j];
      ra[j] += a[i][j];
      rb[i] += b[i][j];
      rb[j] += b[i][j];
    }
  }
  for (int i = 0; i < 4; ++i) {
    rows += ra[i] * rb[i];
    sum_a += ra[i];
    sum_b += rb[i];
  }
  return Scalar(2) * cross / Scalar(4) - Scalar(2) * rows / Scalar(8) + sum_a * sum_b / Scalar(24);
}

}  // namespace rpdcov
