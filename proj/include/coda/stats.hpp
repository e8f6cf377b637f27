#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coda {

/// Regularized lower incomplete gamma P(a, x), series + continued fraction.
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p domain");
    if (x == 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // series representation
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    // continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - gln) * h;
    return 1.0 - q;
}

inline double chi2_cdf(double x, double dof) {
    if (x <= 0.0) return 0.0;
    return gamma_p(dof / 2.0, x / 2.0);
}

/// Chi-square quantile by bisection on the cdf.
inline double chi2_quantile(double p, double dof) {
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("chi2_quantile needs p in (0,1)");
    double lo = 0.0, hi = dof;
    while (chi2_cdf(hi, dof) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_cdf(mid, dof) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-13 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

/// Normal-model consistency factor for the MCD scale:
/// alpha / F_{chi2(p+2)}(q_alpha), q_alpha the chi2(p) alpha-quantile.
inline double mcd_consistency_factor(std::size_t h, std::size_t n, std::size_t p) {
    const double alpha = static_cast<double>(h) / static_cast<double>(n);
    if (alpha >= 1.0) return 1.0;
    const double q = chi2_quantile(alpha, static_cast<double>(p));
    return alpha / chi2_cdf(q, static_cast<double>(p) + 2.0);
}

}  // namespace coda
