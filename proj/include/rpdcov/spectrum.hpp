#pragma once

// Empirical null spectrum of distance covariance. The double-centered
// negative distance matrix of each sample is PSD; its eigenvalues (scaled
// by 1/n) approximate those of the population kernel h_X, and the null
// weights of n * Omega_n are the pairwise products of the X and Y spectra.

#include "rpdcov/random.hpp"
#include "rpdcov/special.hpp"
#include "rpdcov/types.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <functional>
#include <queue>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace rpdcov {

template <typename Scalar>
struct CenteredKernelMatrix {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> entries;
  Eigen::Index source_dim = 0;
};

/// Eigenvalues in descending order.
template <typename Scalar>
struct Spectrum {
  Vector<Scalar> eigenvalues;

  Scalar sum() const { return eigenvalues.sum(); }
  Scalar sum_squares() const { return eigenvalues.squaredNorm(); }
};

/// entry(i, j) = -|X_i - X_j| + rowmean_i + rowmean_j - grandmean.
template <typename Derived>
CenteredKernelMatrix<typename Derived::Scalar> centered_kernel_matrix(const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  detail::require_min_rows(X.rows(), 2, "centered_kernel_matrix");
  detail::require_finite(X, "centered_kernel_matrix");
  const Eigen::Index n = X.rows();
  const DataMatrix<Scalar>& Xr = X.derived();

  CenteredKernelMatrix<Scalar> k;
  k.source_dim = X.cols();
  auto& d = k.entries;
  d.setZero(n, n);
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      d(i, j) = d(j, i) = std::sqrt((Xr.row(i) - Xr.row(j)).squaredNorm());
    }
  }
  const Vector<Scalar> row_mean = d.rowwise().mean();
  const Scalar grand = row_mean.mean();
  // Pairing the row means first keeps the result exactly symmetric.
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) d(i, j) = (row_mean[i] + row_mean[j]) - d(i, j) - grand;
  }
  return k;
}

/// Eigenvalues of K / n, descending. Values below -1e-8 * max are numerical
/// noise on a PSD matrix and are clamped to zero; anything more negative
/// is reported as a NumericError.
template <typename Scalar>
Spectrum<Scalar> empirical_spectrum(const CenteredKernelMatrix<Scalar>& k) {
  const Eigen::Index n = k.entries.rows();
  if (n == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> eig(
      k.entries / static_cast<Scalar>(n), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericError("empirical_spectrum: eigensolver did not converge");
  Vector<Scalar> ev = eig.eigenvalues().reverse();
  const Scalar top = std::max(ev[0], Scalar(0));
  const Scalar floor = Scalar(1e-8) * top;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < Scalar(0)) {
      // Absolute floor covers the all-zero matrix.
      if (ev[i] < -floor && ev[i] < -Scalar(1e-12)) {
        throw NumericError("empirical_spectrum: kernel matrix is not positive semidefinite");
      }
      ev[i] = Scalar(0);
    }
  }
  return Spectrum<Scalar>{std::move(ev)};
}

/// The top_m largest products sx_j * sy_j' in descending order, found by a
/// max-heap walk over the (j, j') lattice without forming all products.
/// Both inputs must be sorted descending and nonnegative.
template <typename Scalar>
Spectrum<Scalar> tensor_spectrum(const Spectrum<Scalar>& sx, const Spectrum<Scalar>& sy, Eigen::Index top_m) {
  if (sx.eigenvalues.size() == 0 || sy.eigenvalues.size() == 0) {
    throw SizeError("tensor_spectrum: empty spectrum");
  }
  if (top_m < 1) throw DomainError("tensor_spectrum: top_m must be >= 1");
  const Eigen::Index nx = sx.eigenvalues.size(), ny = sy.eigenvalues.size();
  const Eigen::Index m = std::min<Eigen::Index>(top_m, nx * ny);

  using Cell = std::pair<Scalar, std::pair<Eigen::Index, Eigen::Index>>;
  std::priority_queue<Cell> heap;
  std::set<std::pair<Eigen::Index, Eigen::Index>> seen;
  const auto push = [&](Eigen::Index i, Eigen::Index j) {
    if (i < nx && j < ny && seen.insert({i, j}).second) {
      heap.push({sx.eigenvalues[i] * sy.eigenvalues[j], {i, j}});
    }
  };
  push(0, 0);
  Vector<Scalar> out(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto [value, ij] = heap.top();
    heap.pop();
    out[k] = value;
    push(ij.first + 1, ij.second);
    push(ij.first, ij.second + 1);
  }
  return Spectrum<Scalar>{std::move(out)};
}

/// Moment-matched Gamma law for sum_i w_i Z_i^2 given sum w and sum w^2.
inline GammaParams gamma_from_weight_moments(double sum_w, double sum_w2) {
  if (!(sum_w > 0.0) || !(sum_w2 > 0.0)) throw DegenerateData("gamma_from_weight_moments: non-positive moments");
  return GammaParams{0.5 * sum_w * sum_w / sum_w2, 0.5 * sum_w / sum_w2};
}

/// Monte Carlo quantile of sum_i w_i Z_i^2 + offset with Z_i iid N(0, 1).
/// `offset` stands in for the mean of weights left out of `weights`.
template <typename Scalar>
double simulate_weighted_chisq_quantile(const Vector<Scalar>& weights, double prob, std::int64_t draws,
                                        std::uint64_t seed, double offset = 0.0) {
  if (draws < 1) throw DomainError("simulate_weighted_chisq_quantile: draws must be >= 1");
  if (!(prob > 0.0 && prob < 1.0)) throw DomainError("simulate_weighted_chisq_quantile: prob must lie in (0, 1)");
  Engine engine = make_engine(RngSeed{seed, 0});
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> samples(static_cast<std::size_t>(draws));
  for (auto& s : samples) {
    double acc = offset;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      const double z = normal(engine);
      acc += static_cast<double>(weights[i]) * z * z;
    }
    s = acc;
  }
  const auto idx = static_cast<std::size_t>(std::ceil(prob * static_cast<double>(draws))) - 1;
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(idx), samples.end());
  return samples[idx];
}

}  // namespace rpdcov
