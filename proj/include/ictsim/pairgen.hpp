#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ictsim/common.hpp"
#include "ictsim/config.hpp"
#include "ictsim/distributions.hpp"
#include "ictsim/random.hpp"
#include "ictsim/trace.hpp"

namespace ictsim {

enum class PairGroup { frequent, sporadic };

struct PairParams {
    user_id i = 0;
    user_id j = 0;
    double r_e = 0.0;            // contact rate, contacts/second
    std::int64_t n_e = 0;        // floor(T_duration * r_e), the encounter budget
    PairGroup group = PairGroup::sporadic;
    double lambda_per_day = 0.0; // day-scale gap rate; meaningful for frequent pairs with n_e >= 2
    double exp_rate = 0.0;       // per-second gap rate, exponential-pairwise variant only
};

namespace detail {

/// P(p <= T) for the short-gap Pareto branch.
inline double short_branch_prob(const SimConfig &c) {
    return 1.0 - std::pow(static_cast<double>(c.granularity_s) / c.t_threshold_s, c.alpha_ict);
}

} // namespace detail

/// Expected realized contact count of a frequent-pair schedule at the given
/// day-scale rate.
///
/// The schedule alternates bursts of short gaps (each gap is short with
/// probability s = P(p <= T)) and day-scale separations k*D_day with
/// k = ceil(Exp(lambda)), re-anchored to mu_day. Because every post-gap
/// encounter lands at mu_day and bursts stay within the day, the arrival day
/// of the i-th day-scale cycle is exactly k_1 + ... + k_i, so with
/// p = 1 - e^(-lambda):
///
///   E[count] = s/q  +  (1/q) * sum_{i>=1} P( NB(i, p) <= D_sim - 1 - i )
///
/// where q = 1 - s, the initial burst has mean s/q, each completed cycle
/// contributes a mean 1/q burst, and NB(i, p) is the negative-binomial
/// (failure-count) law of sum k_j - i. Plain T/E[gap] renewal reasoning is
/// badly biased here: individual gaps are comparable to the whole experiment
/// and bursts front-load contacts.
inline double expected_contact_count(const SimConfig &config, double lambda_per_day) {
    const double s = detail::short_branch_prob(config);
    const double q = 1.0 - s;
    const double p = -std::expm1(-lambda_per_day);
    const int days = config.d_sim_days;
    double cycles = 0.0;
    for (int i = 1; i < days; ++i) {
        const int mmax = days - 1 - i;
        double f = std::pow(p, i);
        if (f <= 0.0)
            continue;
        double cdf = f;
        for (int m = 0; m < mmax; ++m) {
            f *= (1.0 - p) * (i + m) / (m + 1.0);
            cdf += f;
        }
        cycles += std::min(cdf, 1.0);
    }
    return s / q + cycles / q;
}

/// Solves for the day-scale rate lambda making the expected schedule count
/// equal n_e. Bisection on the (strictly increasing) estimator above.
///
/// Feasible targets lie in (s/q, s/q + (D_sim-1)/q): the short-gap burst floor
/// s/q is produced even as lambda -> 0, and at most D_sim - 1 day-scale
/// cycles fit in the experiment. Outside that range no rate exists and a
/// calibration_error is thrown; note the floor grows quickly with alpha_ict.
inline double solve_lambda(const SimConfig &config, std::int64_t n_e) {
    config.validate();
    if (n_e < 2)
        throw calibration_error("solve_lambda: n_e must be >= 2");
    const double target = static_cast<double>(n_e);
    double lo = 1e-9, hi = 60.0;
    if (expected_contact_count(config, hi) < target)
        throw calibration_error(
            "solve_lambda: n_e = " + std::to_string(n_e) +
            " cannot fit in the experiment duration at any admissible rate");
    if (expected_contact_count(config, lo) > target)
        throw calibration_error(
            "solve_lambda: n_e = " + std::to_string(n_e) +
            " is below the short-gap burst floor implied by alpha_ict = " +
            std::to_string(config.alpha_ict) + "; decrease alpha_ict");
    for (int it = 0; it < 90; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (expected_contact_count(config, mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Memoized n_e -> lambda map; calibration depends on the pair only through
/// n_e. One instance serves one config: do not share across configs.
class LambdaCache {
public:
    double get(const SimConfig &config, std::int64_t n_e) {
        auto it = cache_.find(n_e);
        if (it != cache_.end())
            return it->second;
        const double lam = solve_lambda(config, n_e);
        cache_.emplace(n_e, lam);
        return lam;
    }

private:
    std::unordered_map<std::int64_t, double> cache_;
};

/// Draws one pairwise intercontact gap (seconds) for a frequent pair.
///
/// First a Pareto(alpha_ict, granularity) sample p: if p <= T it is the gap.
/// Otherwise the pair separates for k = ceil(Exp(lambda)) whole days and
/// re-meets around mu_day: gap = k*D_day + (mu_day - t_day) + N(0, sigma_day),
/// where t_day is the time of day at separation. With the periodic term
/// ablated the day-scale branch is the raw fractional-day draw Exp(lambda) *
/// D_day. Results are clamped to >= granularity.
///
/// Draw order (tests rely on it): pareto uniform; then for the day-scale
/// branch one exponential uniform and, when periodic, exactly two normal
/// uniforms.
template <UniformSource S>
double sample_ict_piecewise(const SimConfig &config, double lambda_per_day, double t_day_s,
                            S &stream) {
    const double g = static_cast<double>(config.granularity_s);
    const double p = sample_pareto({config.alpha_ict, g}, stream);
    if (p <= config.t_threshold_s)
        return std::max(p, g);
    const double e_days = sample_exponential(lambda_per_day, stream);
    double gap;
    if (config.periodic) {
        const double k = std::ceil(e_days);
        gap = k * static_cast<double>(config.d_day_s) +
              sample_normal(config.mu_day_s - t_day_s, config.sigma_day_s, stream);
    } else {
        gap = e_days * static_cast<double>(config.d_day_s);
    }
    return std::max(gap, g);
}

namespace detail {

inline tick_t quantize_tick(double seconds, std::int64_t granularity_s) {
    return static_cast<tick_t>(std::llround(seconds / static_cast<double>(granularity_s)));
}

/// Sequentially appends gap+duration events until the horizon. Shared by the
/// piecewise and exponential-pairwise assemblies; next_gap(t_day_s) yields the
/// next intercontact time in seconds.
template <typename GapFn, UniformSource S>
std::vector<ContactEvent> assemble_sequential(const SimConfig &config, user_id i, user_id j,
                                              GapFn &&next_gap, S &stream) {
    const tick_t horizon = config.duration_ticks();
    const double horizon_s = config.duration_s();
    const double g = static_cast<double>(config.granularity_s);
    std::vector<ContactEvent> events;
    tick_t prev_end = 0;
    double prev_end_s = 0.0;
    for (;;) {
        const double t_day = std::fmod(prev_end_s, static_cast<double>(config.d_day_s));
        const double gap = next_gap(t_day);
        const double start_s = prev_end_s + gap;
        if (!(start_s < horizon_s)) // also stops on non-finite gaps
            break;
        const tick_t start = std::max(quantize_tick(start_s, config.granularity_s),
                                      prev_end + 1);
        if (start >= horizon)
            break;
        const double dur = sample_pareto({config.alpha_c, g}, stream);
        const tick_t dur_ticks = std::max<tick_t>(quantize_tick(dur, config.granularity_s), 1);
        const tick_t end = std::min(start + dur_ticks, horizon);
        events.push_back({i, j, start, end});
        prev_end = end;
        prev_end_s = static_cast<double>(end) * g;
    }
    return events;
}

/// Sporadic placement: n encounter times drawn independently (uniform day,
/// time of day around mu_day), sorted, durations attached. A duration that
/// would run into the next encounter is cut to end one granularity unit
/// before it; encounters that collapse to zero length are merged.
template <UniformSource S>
std::vector<ContactEvent> place_uniform_encounters(const SimConfig &config, user_id i, user_id j,
                                                   std::int64_t n, S &stream) {
    const tick_t horizon = config.duration_ticks();
    const double g = static_cast<double>(config.granularity_s);
    std::vector<tick_t> starts;
    starts.reserve(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) {
        double start_s;
        if (config.periodic) {
            const double u = sample_uniform(0.0, static_cast<double>(config.d_sim_days), stream);
            const auto day = std::min<std::int64_t>(static_cast<std::int64_t>(u),
                                                    config.d_sim_days - 1);
            start_s = static_cast<double>(day) * static_cast<double>(config.d_day_s) +
                      sample_normal(config.mu_day_s, config.sigma_day_s, stream);
        } else {
            start_s = sample_uniform(0.0, static_cast<double>(config.d_sim_days), stream) *
                      static_cast<double>(config.d_day_s);
        }
        // out-of-range draws are dropped, not clipped; quantize only in range
        if (!(start_s >= 0.0) || !(start_s < config.duration_s()))
            continue;
        const tick_t t = quantize_tick(start_s, config.granularity_s);
        if (t >= 0 && t < horizon)
            starts.push_back(t);
    }
    std::sort(starts.begin(), starts.end());
    std::vector<ContactEvent> events;
    events.reserve(starts.size());
    for (const tick_t start : starts) {
        const double dur = sample_pareto({config.alpha_c, g}, stream);
        const tick_t dur_ticks = std::max<tick_t>(quantize_tick(dur, config.granularity_s), 1);
        const tick_t end = std::min(start + dur_ticks, horizon);
        if (events.empty()) {
            events.push_back({i, j, start, end});
            continue;
        }
        ContactEvent &prev = events.back();
        if (start - prev.end >= 1) {
            events.push_back({i, j, start, end});
        } else if (start - 1 > prev.start) {
            prev.end = start - 1;
            events.push_back({i, j, start, end});
        } else {
            prev.end = std::max(prev.end, end);
        }
    }
    return events;
}

} // namespace detail

/// Assigns contact rate, encounter budget and group to a pair. The gamma draw
/// is the pair's expected total contacts over the experiment; r_e divides by
/// the duration, so n_e = floor(draw). Frequent pairs (r_e > T_e) with
/// n_e >= 2 get their day-scale rate calibrated here.
template <UniformSource S>
PairParams draw_pair_params(const SimConfig &config, user_id i, user_id j, S &stream,
                            LambdaCache *cache = nullptr) {
    config.validate();
    if (!(i >= 0 && j >= 0 && i < j))
        throw config_error("draw_pair_params: need 0 <= i < j");
    PairParams out;
    out.i = i;
    out.j = j;
    const double draw = sample_gamma(config.gamma, stream);
    out.r_e = draw / config.duration_s();
    out.n_e = static_cast<std::int64_t>(std::floor(config.duration_s() * out.r_e));
    out.group = out.r_e > config.t_e ? PairGroup::frequent : PairGroup::sporadic;
    if (config.variant == Variant::exponential_pairwise) {
        out.exp_rate = out.r_e;
    } else if (out.group == PairGroup::frequent && out.n_e >= 2) {
        try {
            out.lambda_per_day =
                cache ? cache->get(config, out.n_e) : solve_lambda(config, out.n_e);
        } catch (const calibration_error &e) {
            throw calibration_error("pair " + pair_label(i, j) + ": " + e.what());
        }
    }
    return out;
}

/// Generates the full contact schedule of one pair under the piecewise model.
/// Frequent pairs walk encounter times sequentially (gap then duration, first
/// duration zero); sporadic pairs and degenerate budgets (n_e <= 1) place
/// their encounters independently. Events come out time-sorted,
/// non-overlapping, quantized, inside [0, T_duration].
template <UniformSource S>
std::vector<ContactEvent> generate_pair_schedule(const SimConfig &config, const PairParams &params,
                                                 S &stream) {
    if (params.n_e <= 0)
        return {};
    if (params.group == PairGroup::sporadic || params.n_e < 2)
        return detail::place_uniform_encounters(config, params.i, params.j, params.n_e, stream);
    return detail::assemble_sequential(
        config, params.i, params.j,
        [&](double t_day) {
            return sample_ict_piecewise(config, params.lambda_per_day, t_day, stream);
        },
        stream);
}

/// Exponential-pairwise variant: gaps are purely exponential with per-second
/// rate r_e; no day-scale branch, no periodic term. Durations unchanged.
template <UniformSource S>
std::vector<ContactEvent> generate_pair_schedule_exponential(const SimConfig &config,
                                                             const PairParams &params, S &stream) {
    if (!(params.exp_rate > 0.0))
        return {};
    const double g = static_cast<double>(config.granularity_s);
    return detail::assemble_sequential(
        config, params.i, params.j,
        [&](double) { return std::max(sample_exponential(params.exp_rate, stream), g); }, stream);
}

} // namespace ictsim
