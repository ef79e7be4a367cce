#pragma once

#include <cmath>
#include <numbers>

#include "ictsim/common.hpp"
#include "ictsim/random.hpp"

namespace ictsim {

/// Pareto(alpha, x_min): survival (x/x_min)^-alpha for x >= x_min.
struct ParetoParams {
    double alpha; // tail exponent, > 0
    double x_min; // scale, > 0 (seconds here)

    void validate() const {
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw config_error("pareto: alpha must be finite and > 0");
        if (!(x_min > 0.0) || !std::isfinite(x_min))
            throw config_error("pareto: x_min must be finite and > 0");
    }
};

/// Gamma in shape-rate form: pdf x^(shape-1) rate^shape e^(-rate x) / Gamma(shape).
struct GammaParams {
    double shape; // > 0
    double rate;  // > 0

    void validate() const {
        if (!(shape > 0.0) || !std::isfinite(shape))
            throw config_error("gamma: shape must be finite and > 0");
        if (!(rate > 0.0) || !std::isfinite(rate))
            throw config_error("gamma: rate must be finite and > 0");
    }
};

/// Inverse-CDF Pareto sample; consumes exactly one uniform.
template <UniformSource S>
double sample_pareto(const ParetoParams &params, S &stream) {
    params.validate();
    const double u = stream.next_double();
    return params.x_min * std::pow(1.0 - u, -1.0 / params.alpha);
}

/// Inverse-CDF exponential sample; consumes exactly one uniform. The inverse
/// CDF is exact: u = 0 maps to 0.
template <UniformSource S>
double sample_exponential(double rate, S &stream) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw config_error("exponential: rate must be finite and > 0");
    const double u = stream.next_double();
    return -std::log1p(-u) / rate;
}

/// Uniform on [lo, hi]; consumes exactly one uniform. Degenerate lo == hi is allowed.
template <UniformSource S>
double sample_uniform(double lo, double hi, S &stream) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
        throw config_error("uniform: need finite lo <= hi");
    const double u = stream.next_double();
    return lo + (hi - lo) * u;
}

/// Box-Muller normal sample; always consumes exactly two uniforms.
template <UniformSource S>
double sample_normal(double mu, double sigma, S &stream) {
    if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma < 0.0)
        throw config_error("normal: need finite mu and sigma >= 0");
    const double u1 = stream.next_double();
    const double u2 = stream.next_double();
    const double z = std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mu + sigma * z;
}

/// Gamma sample, Marsaglia-Tsang squeeze for shape >= 1 with the power boost
/// for shape < 1 (handles the density singularity at 0, e.g. shape 0.19).
/// Rejection-based: the number of uniforms consumed is unspecified.
template <UniformSource S>
double sample_gamma(const GammaParams &params, S &stream) {
    params.validate();
    if (params.shape < 1.0) {
        const double x = sample_gamma<S>({params.shape + 1.0, params.rate}, stream);
        // 1 - u lies in (0, 1], keeping the boosted sample strictly positive
        const double u = stream.next_double();
        return x * std::pow(1.0 - u, 1.0 / params.shape);
    }
    const double d = params.shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double z = sample_normal(0.0, 1.0, stream);
        const double t = 1.0 + c * z;
        if (t <= 0.0)
            continue;
        const double v = t * t * t;
        const double u = stream.next_double();
        if (std::log(u + 1e-300) < 0.5 * z * z + d - d * v + d * std::log(v))
            return d * v / params.rate;
    }
}

} // namespace ictsim
