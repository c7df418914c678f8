#pragma once

namespace essograph {

// Lower regularized incomplete gamma function P(a, x) for a > 0, x >= 0.
// Series expansion for x < a + 1, continued fraction otherwise.
double regularized_gamma_p(double a, double x);

// CDF of the chi-squared distribution with df degrees of freedom.
double chi2_cdf(double x, int df);

// Quantile (inverse CDF) of the chi-squared distribution: the smallest x
// with CDF(x) >= p, located by bisection to a relative tolerance of 1e-12.
// Throws ArgumentError for df <= 0 or p outside (0, 1).
double chi2_quantile(double p, int df);

} // namespace essograph
