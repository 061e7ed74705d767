#include "rpdcov/special.hpp"

#include "rpdcov/types.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace rpdcov {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSeriesTerms = 100000;

// P(a, x) by the power series; converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the continued fraction (modified Lentz); for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxSeriesTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_args(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("incomplete gamma: shape must be positive and finite");
  if (!(x >= 0.0)) throw DomainError("incomplete gamma: x must be nonnegative");
}

// d/dx P(a, x)
double gamma_density(double a, double x) {
  if (x <= 0.0) return a < 1.0 ? std::numeric_limits<double>::infinity() : (a == 1.0 ? 1.0 : 0.0);
  return std::exp((a - 1.0) * std::log(x) - x - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double gamma_quantile(const GammaParams& params, double prob) {
  if (!(params.shape > 0.0) || !std::isfinite(params.shape) || !(params.rate > 0.0) ||
      !std::isfinite(params.rate)) {
    throw DomainError("gamma_quantile: shape and rate must be positive and finite");
  }
  if (!(prob > 0.0 && prob < 1.0)) throw DomainError("gamma_quantile: prob must lie in (0, 1)");

  const double a = params.shape;
  // Residual measured on the smaller tail so upper quantiles keep precision.
  const bool upper = prob > 0.5;
  const auto residual = [&](double z) {
    return upper ? (1.0 - prob) - regularized_gamma_q(a, z) : regularized_gamma_p(a, z) - prob;
  };

  // Start from the small-z expansion P(a, z) ~ z^a / Gamma(a + 1) when it
  // is informative, else from the mean, then widen geometrically.
  double guess = std::exp((std::log(prob) + std::lgamma(a + 1.0)) / a);
  if (!(guess > 0.0) || !std::isfinite(guess) || guess > a) guess = a;
  double lo = guess, hi = guess;
  while (residual(lo) > 0.0) {
    lo *= 0.5;
    if (lo < std::numeric_limits<double>::denorm_min() * 4) return 0.0;
  }
  while (residual(hi) < 0.0) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericError("gamma_quantile: failed to bracket the quantile");
  }

  double z = lo == hi ? lo : std::sqrt(lo) * std::sqrt(hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double r = residual(z);
    if (r == 0.0) break;
    if (r < 0.0) {
      lo = z;
    } else {
      hi = z;
    }
    if (std::fabs(r) <= 1e-15 * std::min(prob, 1.0 - prob) || hi - lo <= 4.0 * kEps * hi) break;

    // Newton step on the residual (both forms share the same derivative);
    // fall back to bisection, geometric while the bracket spans a wide
    // range, when it leaves the bracket.
    const double slope = gamma_density(a, z);
    double next = (slope > 0.0 && std::isfinite(slope)) ? z - r / slope : lo - 1.0;
    if (!(next > lo && next < hi)) next = (hi > 2.0 * lo && lo > 0.0) ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi);
    z = next;
  }
  return z / params.rate;
}

double chi_squared_quantile(double df, double prob) {
  if (!(df > 0.0)) throw DomainError("chi_squared_quantile: df must be positive");
  return gamma_quantile(GammaParams{df / 2.0, 0.5}, prob);
}

}  // namespace rpdcov
