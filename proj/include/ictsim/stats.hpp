#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "ictsim/common.hpp"
#include "ictsim/pairgen.hpp"
#include "ictsim/trace.hpp"

namespace ictsim {

/// Empirical complementary CDF. Point k stores (v_k, P(X >= v_k)) over the
/// sorted unique sample values, so the first point carries p = 1. Evaluation
/// is the step function P(X >= t).
struct Ccdf {
    std::vector<std::pair<double, double>> points;

    static Ccdf from_samples(std::vector<double> samples) {
        if (samples.empty())
            throw data_error("ccdf: no samples");
        std::sort(samples.begin(), samples.end());
        Ccdf out;
        const double n = static_cast<double>(samples.size());
        std::size_t k = 0;
        while (k < samples.size()) {
            std::size_t k2 = k;
            while (k2 < samples.size() && samples[k2] == samples[k])
                ++k2;
            out.points.emplace_back(samples[k], static_cast<double>(samples.size() - k) / n);
            k = k2;
        }
        return out;
    }

    /// P(X >= t); 1 below the support, 0 above it.
    double eval(double t) const {
        if (points.empty())
            throw data_error("ccdf: empty");
        auto it = std::lower_bound(points.begin(), points.end(), t,
                                   [](const auto &pt, double v) { return pt.first < v; });
        if (it == points.end())
            return 0.0;
        return it->second;
    }

    double min_t() const { return points.front().first; }
    double max_t() const { return points.back().first; }
};

struct ComparisonReport {
    double avg_rel_error = 0.0;
    double max_rel_error = 0.0;
    double max_error_location = 0.0; // grid abscissa (seconds) of the worst point
    std::vector<double> grid;
};

/// Pools every pair's intercontact times into one empirical CCDF.
inline Ccdf aggregate_ccdf(const Trace &trace) {
    std::vector<double> samples;
    for (const auto &[key, evs] : trace.pairs()) {
        for (std::size_t k = 1; k < evs.size(); ++k)
            samples.push_back(static_cast<double>(evs[k].first - evs[k - 1].second) *
                              trace.granularity_s());
    }
    if (samples.empty())
        throw data_error("aggregate_ccdf: trace yields no intercontact times");
    return Ccdf::from_samples(std::move(samples));
}

/// Pointwise relative error |model - ref| / ref on a log-spaced grid spanning
/// the overlap of both supports.
inline ComparisonReport compare_ccdf(const Ccdf &model, const Ccdf &reference,
                                     int grid_points = 64) {
    if (model.points.empty() || reference.points.empty())
        throw data_error("compare_ccdf: empty ccdf");
    if (grid_points < 2)
        throw data_error("compare_ccdf: need at least 2 grid points");
    const double lo = std::max(model.min_t(), reference.min_t());
    const double hi = std::min(model.max_t(), reference.max_t());
    if (!(lo <= hi) || !(lo > 0.0))
        throw data_error("compare_ccdf: supports do not overlap");
    ComparisonReport rep;
    rep.grid.reserve(static_cast<std::size_t>(grid_points));
    const double lr = std::log(lo), step = (std::log(hi) - lr) / (grid_points - 1);
    double sum = 0.0;
    for (int k = 0; k < grid_points; ++k) {
        const double t = std::exp(lr + step * k);
        rep.grid.push_back(t);
        const double r = reference.eval(t);
        const double m = model.eval(t);
        const double err = r > 0.0 ? std::abs(m - r) / r : (m > 0.0 ? HUGE_VAL : 0.0);
        sum += err;
        if (err >= rep.max_rel_error) {
            rep.max_rel_error = err;
            rep.max_error_location = t;
        }
    }
    rep.avg_rel_error = sum / grid_points;
    return rep;
}

/// Fraction of pairs whose encounter budget is zero.
inline double zero_contact_fraction(const SimConfig &config, std::span<const PairParams> params) {
    const std::size_t expected =
        static_cast<std::size_t>(config.n_users) * (config.n_users - 1) / 2;
    if (params.size() != expected)
        throw data_error("zero_contact_fraction: params list does not cover all pairs");
    std::size_t zero = 0;
    for (const auto &p : params)
        zero += (p.n_e == 0);
    return static_cast<double>(zero) / static_cast<double>(params.size());
}

/// Same statistic computed from an assembled trace (pairs with no events).
inline double zero_contact_fraction(const Trace &trace) {
    const std::size_t all =
        static_cast<std::size_t>(trace.n_users()) * (trace.n_users() - 1) / 2;
    std::size_t with_contact = 0;
    for (const auto &[key, evs] : trace.pairs())
        with_contact += !evs.empty();
    return static_cast<double>(all - with_contact) / static_cast<double>(all);
}

using PairCounts = std::map<PairKey, std::int64_t>;

inline PairCounts contact_counts(const Trace &trace) {
    PairCounts out;
    for (const auto &[key, evs] : trace.pairs())
        out[key] = static_cast<std::int64_t>(evs.size());
    return out;
}

/// Per-pair relative error in contact counts, restricted to pairs with at
/// least one contact on both sides. max_error_location carries the linear
/// pair index i * n + j of the worst pair.
inline ComparisonReport contact_count_comparison(const Trace &trace, const PairCounts &reference) {
    const PairCounts model = contact_counts(trace);
    double sum = 0.0;
    std::size_t used = 0;
    ComparisonReport rep;
    for (const auto &[key, ref_count] : reference) {
        if (ref_count < 1)
            continue;
        const auto it = model.find(key);
        if (it == model.end() || it->second < 1)
            continue;
        const double err = std::abs(static_cast<double>(it->second - ref_count)) /
                           static_cast<double>(ref_count);
        sum += err;
        ++used;
        if (err >= rep.max_rel_error) {
            rep.max_rel_error = err;
            rep.max_error_location = static_cast<double>(
                static_cast<std::int64_t>(key.first) * trace.n_users() + key.second);
        }
    }
    if (used == 0)
        throw data_error("contact_count_comparison: no pair has contacts on both sides");
    rep.avg_rel_error = sum / static_cast<double>(used);
    return rep;
}

/// Daily-periodicity score: Pearson autocorrelation at lag d_day of the
/// granularity-binned histogram of tail intercontact times (t > tail_min_s;
/// default half a day). Near 1 for day-multiple combs, near 0 for structure-
/// less tails. Throws if fewer than 100 tail samples.
inline double periodicity_score(const Trace &trace, double tail_min_s = -1.0) {
    const double g = trace.granularity_s();
    const double day = static_cast<double>(trace.meta().d_day_s);
    if (tail_min_s < 0.0)
        tail_min_s = 0.5 * day;
    std::vector<double> tail;
    for (const auto &[key, evs] : trace.pairs()) {
        for (std::size_t k = 1; k < evs.size(); ++k) {
            const double ict = static_cast<double>(evs[k].first - evs[k - 1].second) * g;
            if (ict > tail_min_s)
                tail.push_back(ict);
        }
    }
    if (tail.size() < 100)
        throw data_error("periodicity_score: fewer than 100 tail samples");
    const auto [mn, mx] = std::minmax_element(tail.begin(), tail.end());
    const auto lo_bin = static_cast<std::int64_t>(std::floor(*mn / g));
    const auto n_bins = static_cast<std::size_t>(std::floor(*mx / g) - lo_bin + 1);
    const auto lag = static_cast<std::size_t>(day / g);
    if (n_bins <= lag + 2)
        throw data_error("periodicity_score: tail span shorter than one day lag");
    std::vector<double> h(n_bins, 0.0);
    for (const double v : tail)
        ++h[static_cast<std::size_t>(std::floor(v / g)) - lo_bin];
    double mean = 0.0;
    for (const double x : h)
        mean += x;
    mean /= static_cast<double>(n_bins);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < n_bins; ++k) {
        const double d = h[k] - mean;
        den += d * d;
        if (k + lag < n_bins)
            num += d * (h[k + lag] - mean);
    }
    if (den == 0.0)
        throw data_error("periodicity_score: degenerate histogram");
    return num / den;
}

// ---- regression helpers for distribution-shape analysis ----

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw data_error("fit_line: need at least two points");
    double sx = 0, sy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sx += x[k];
        sy += y[k];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (sxx == 0.0)
        throw data_error("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

/// OLS slope of log10 CCDF vs log10 t on a log-spaced grid over [lo, hi],
/// skipping grid points past the support.
inline LineFit fit_loglog_slope(const Ccdf &ccdf, double lo, double hi, int n_points = 24) {
    std::vector<double> xs, ys;
    const double lr = std::log(lo), step = (std::log(hi) - lr) / (n_points - 1);
    for (int k = 0; k < n_points; ++k) {
        const double t = std::exp(lr + step * k);
        const double p = ccdf.eval(t);
        if (p > 0.0) {
            xs.push_back(std::log10(t));
            ys.push_back(std::log10(p));
        }
    }
    return fit_line(xs, ys);
}

/// OLS of ln CCDF vs t (linear abscissae) over [lo, hi]: the exponential-
/// decay diagnostic. slope is per second.
inline LineFit fit_exponential_tail(const Ccdf &ccdf, double lo, double hi, int n_points = 36) {
    std::vector<double> xs, ys;
    for (int k = 0; k < n_points; ++k) {
        const double t = lo + (hi - lo) * k / (n_points - 1);
        const double p = ccdf.eval(t);
        if (p > 0.0) {
            xs.push_back(t);
            ys.push_back(std::log(p));
        }
    }
    return fit_line(xs, ys);
}

/// Locates the change from the short-gap regime to the day-scale decay: the
/// best breakpoint of a two-segment fit (constant, then linear in t) to
/// ln CCDF on a log grid over [fit_lo, fit_hi], candidates on [cand_lo,
/// cand_hi]. Returns seconds.
inline double detect_regime_change(const Ccdf &ccdf, double fit_lo, double fit_hi,
                                   double cand_lo, double cand_hi, int n_candidates = 48) {
    std::vector<double> ts, ls;
    const double lr = std::log(fit_lo), step = (std::log(fit_hi) - lr) / 119.0;
    for (int k = 0; k < 120; ++k) {
        const double t = std::exp(lr + step * k);
        const double p = ccdf.eval(t);
        if (p > 0.0) {
            ts.push_back(t);
            ls.push_back(std::log(p));
        }
    }
    if (ts.size() < 8)
        throw data_error("detect_regime_change: not enough supported grid points");
    double best_sse = HUGE_VAL, best_t = cand_lo;
    for (int c = 0; c < n_candidates; ++c) {
        const double b = cand_lo + (cand_hi - cand_lo) * c / (n_candidates - 1);
        std::vector<double> lx, ly, rx, ry;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            if (ts[k] <= b) {
                lx.push_back(ts[k]);
                ly.push_back(ls[k]);
            } else {
                rx.push_back(ts[k]);
                ry.push_back(ls[k]);
            }
        }
        if (lx.size() < 3 || rx.size() < 3)
            continue;
        double lm = 0.0;
        for (const double v : ly)
            lm += v;
        lm /= static_cast<double>(ly.size());
        double sse = 0.0;
        for (const double v : ly)
            sse += (v - lm) * (v - lm);
        const LineFit rf = fit_line(rx, ry);
        for (std::size_t k = 0; k < rx.size(); ++k) {
            const double resid = ry[k] - (rf.intercept + rf.slope * rx[k]);
            sse += resid * resid;
        }
        if (sse < best_sse) {
            best_sse = sse;
            best_t = b;
        }
    }
    return best_t;
}

} // namespace ictsim
