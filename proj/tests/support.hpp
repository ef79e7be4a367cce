#pragma once

// Test-side oracles: forced random sources, analytic CDFs and a KS statistic,
// all independent of the library's sampling paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace testsupport {

/// Feeds a predetermined list of "uniforms"; throws when exhausted.
struct ForcedStream {
    std::vector<double> draws;
    std::size_t next = 0;

    double next_double() {
        if (next >= draws.size())
            throw std::runtime_error("ForcedStream exhausted");
        return draws[next++];
    }
};

inline double pareto_cdf(double x, double alpha, double x_min) {
    return x < x_min ? 0.0 : 1.0 - std::pow(x_min / x, alpha);
}

inline double exponential_cdf(double x, double rate) {
    return x < 0.0 ? 0.0 : -std::expm1(-rate * x);
}

inline double uniform_cdf(double x, double lo, double hi) {
    if (x <= lo)
        return 0.0;
    if (x >= hi)
        return 1.0;
    return (x - lo) / (hi - lo);
}

inline double normal_cdf(double x, double mu, double sigma) {
    return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0)));
}

/// Regularized lower incomplete gamma P(a, x) via the standard series /
/// continued-fraction split.
inline double reg_lower_gamma(double a, double x) {
    if (x < 0.0 || a <= 0.0)
        throw std::invalid_argument("reg_lower_gamma domain");
    if (x == 0.0)
        return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a, sum = term;
        for (int n = 1; n < 500; ++n) {
            term *= x / (a + n);
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-15)
                break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Lentz continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int n = 1; n < 500; ++n) {
        const double an = -n * (n - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15)
            break;
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

inline double gamma_cdf(double x, double shape, double rate) {
    return x <= 0.0 ? 0.0 : reg_lower_gamma(shape, rate * x);
}

/// Two-sided KS distance between a sample and an analytic CDF.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)> &cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double f = cdf(samples[k]);
        d = std::max(d, std::abs(f - static_cast<double>(k) / n));
        d = std::max(d, std::abs(static_cast<double>(k + 1) / n - f));
    }
    return d;
}

/// Large-sample KS critical value at significance 0.01.
inline double ks_critical_01(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

} // namespace testsupport
