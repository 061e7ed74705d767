#pragma once

namespace rpdcov {

/// Gamma(shape, rate) with density beta^alpha / Gamma(alpha) x^(alpha-1) e^(-beta x).
struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;

  double mean() const { return shape / rate; }
  double variance() const { return shape / (rate * rate); }
};

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

/// Upper tail Q(a, x) = 1 - P(a, x), computed without cancellation.
double regularized_gamma_q(double a, double x);

/// Quantile q with P(shape, rate * q) = prob. Bracketed bisection refined by
/// Newton steps; at most 200 iterations.
double gamma_quantile(const GammaParams& params, double prob);

/// Chi-square(df) quantile, i.e. Gamma(df / 2, 1 / 2).
double chi_squared_quantile(double df, double prob);

}  // namespace rpdcov
