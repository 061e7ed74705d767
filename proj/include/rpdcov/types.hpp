#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace rpdcov {

// One observation per row. Row-major so that the pairwise distance loops
// stream contiguous rows.
template <typename Scalar>
using DataMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = DataMatrix<double>;
using VectorXd = Vector<double>;

// Error taxonomy. The CLI maps these onto exit codes.
struct SizeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// One of the samples has no spread (all pairwise distances zero), so the
// null reference distribution cannot be fitted.
struct DegenerateData : NumericError {
  using NumericError::NumericError;
};

enum class DcovMethod { fast_univariate, bruteforce, projected_single, projected_average };

inline const char* to_string(DcovMethod m) {
  switch (m) {
    case DcovMethod::fast_univariate: return "fast_univariate";
    case DcovMethod::bruteforce: return "bruteforce";
    case DcovMethod::projected_single: return "projected_single";
    case DcovMethod::projected_average: return "projected_average";
  }
  return "unknown";
}

struct DcovEstimate {
  double value = 0.0;  // signed; never clamped
  DcovMethod method = DcovMethod::fast_univariate;
  std::int64_t n = 0;
  std::optional<std::int64_t> k_projections;
  std::optional<std::uint64_t> seed;
};

namespace detail {

template <typename Derived>
void require_finite(const Eigen::DenseBase<Derived>& m, const char* what) {
  if (!m.allFinite()) throw DomainError(std::string(what) + ": non-finite entry");
}

inline void require_min_rows(Eigen::Index n, Eigen::Index min_n, const char* what) {
  if (n < min_n) {
    throw SizeError(std::string(what) + ": need at least " + std::to_string(min_n) +
                    " observations, got " + std::to_string(n));
  }
}

inline void require_same_rows(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw SizeError(std::string(what) + ": sample sizes differ (" + std::to_string(a) +
                    " vs " + std::to_string(b) + ")");
  }
}

}  // namespace detail
}  // namespace rpdcov
