#include "essograph/chi_square.hpp"

#include "essograph/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace essograph {

namespace {

// Series representation of P(a, x); converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued-fraction representation of Q(a, x) = 1 - P(a, x); converges
// quickly for x >= a + 1.  Modified Lentz evaluation.
double gamma_q_cont_fraction(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / 1e-30;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0) throw ArgumentError("regularized_gamma_p: a must be positive");
    if (x < 0.0) throw ArgumentError("regularized_gamma_p: x must be non-negative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cont_fraction(a, x);
}

double chi2_cdf(double x, int df) {
    if (df <= 0) throw ArgumentError("chi2_cdf: df must be positive, got " + std::to_string(df));
    if (x <= 0.0) return 0.0;
    return regularized_gamma_p(0.5 * df, 0.5 * x);
}

double chi2_quantile(double p, int df) {
    if (df <= 0)
        throw ArgumentError("chi2_quantile: df must be positive, got " + std::to_string(df));
    if (!(p > 0.0 && p < 1.0))
        throw ArgumentError("chi2_quantile: p must lie strictly between 0 and 1");

    // Bracket the quantile, then bisect until the interval is tight in both
    // absolute and relative terms.
    double lo = 0.0;
    double hi = 1.0;
    while (chi2_cdf(hi, df) < p) {
        hi *= 2.0;
        if (hi > 1e12) break;
    }
    for (int i = 0; i < 500; ++i) {
        double mid = 0.5 * (lo + hi);
        if (chi2_cdf(mid, df) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace essograph
