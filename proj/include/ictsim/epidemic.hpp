#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "ictsim/common.hpp"
#include "ictsim/random.hpp"
#include "ictsim/trace.hpp"

namespace ictsim {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

struct EpidemicRun {
    user_id seed_node = 0;
    double t0_s = 0.0;
    std::set<user_id> blacklist;
    std::vector<double> infection_times; // seconds, kNever if uninfected
};

/// Averaged fraction-infected step function; points are (seconds since t0,
/// fraction) on the granularity grid.
struct InfectionCurve {
    std::vector<std::pair<double, double>> points;
};

struct CentralityVector {
    std::vector<double> values; // C_i per user
    double horizon_s = 0.0;
};

/// What a blacklist means for its members: transmission always halts; whether
/// they may still receive the message is a policy choice.
enum class BlacklistPolicy {
    halt_transmission, // members receive but never relay
    isolate,           // members neither receive nor relay
};

/// Replays epidemic routing over the trace: the seed holds the message from
/// t0; a susceptible node is infected at max(event start, infector's own
/// infection time) whenever that instant falls inside a shared contact.
/// Contacts already active at t0 transmit at t0. Earliest-infection-time
/// label setting over the temporal graph, so within-contact relay chains
/// resolve exactly.
inline EpidemicRun run_epidemic(const Trace &trace, user_id seed_node, double t0_s,
                                const std::set<user_id> &blacklist = {},
                                BlacklistPolicy policy = BlacklistPolicy::halt_transmission) {
    const int n = trace.n_users();
    if (seed_node < 0 || seed_node >= n)
        throw query_error("run_epidemic: unknown seed node");
    if (!(t0_s >= 0.0) || t0_s > trace.meta().duration_s())
        throw query_error("run_epidemic: t0 outside the trace span");

    struct Link {
        user_id peer;
        double start, end;
    };
    std::vector<std::vector<Link>> adj(static_cast<std::size_t>(n));
    for (const auto &e : trace.events()) {
        const double s = trace.start_s(e), en = trace.end_s(e);
        adj[static_cast<std::size_t>(e.i)].push_back({e.j, s, en});
        adj[static_cast<std::size_t>(e.j)].push_back({e.i, s, en});
    }

    EpidemicRun run;
    run.seed_node = seed_node;
    run.t0_s = t0_s;
    run.blacklist = blacklist;
    run.infection_times.assign(static_cast<std::size_t>(n), kNever);
    run.infection_times[static_cast<std::size_t>(seed_node)] = t0_s;

    using Item = std::pair<double, user_id>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.push({t0_s, seed_node});
    while (!pq.empty()) {
        const auto [t, u] = pq.top();
        pq.pop();
        if (t > run.infection_times[static_cast<std::size_t>(u)])
            continue;
        if (blacklist.contains(u))
            continue; // infected at most, never relays
        for (const Link &l : adj[static_cast<std::size_t>(u)]) {
            if (policy == BlacklistPolicy::isolate && blacklist.contains(l.peer))
                continue;
            const double when = std::max(l.start, t);
            if (when <= l.end && when < run.infection_times[static_cast<std::size_t>(l.peer)]) {
                run.infection_times[static_cast<std::size_t>(l.peer)] = when;
                pq.push({when, l.peer});
            }
        }
    }
    return run;
}

/// Pointwise mean of the runs' fraction-infected step functions on the grid
/// {0, step, 2*step, ..., horizon} seconds after each run's t0.
inline InfectionCurve infection_curve(std::span<const EpidemicRun> runs, double horizon_s,
                                      double step_s) {
    if (runs.empty())
        throw data_error("infection_curve: no runs");
    if (!(step_s > 0.0) || !(horizon_s >= 0.0))
        throw data_error("infection_curve: bad grid");
    const auto n_pts = static_cast<std::size_t>(std::floor(horizon_s / step_s)) + 1;
    InfectionCurve curve;
    curve.points.resize(n_pts);
    for (std::size_t k = 0; k < n_pts; ++k)
        curve.points[k] = {static_cast<double>(k) * step_s, 0.0};
    for (const auto &run : runs) {
        const double nu = static_cast<double>(run.infection_times.size());
        std::vector<double> rel;
        rel.reserve(run.infection_times.size());
        for (const double t : run.infection_times)
            if (t < kNever)
                rel.push_back(t - run.t0_s);
        std::sort(rel.begin(), rel.end());
        for (std::size_t k = 0; k < n_pts; ++k) {
            const auto it = std::upper_bound(rel.begin(), rel.end(), curve.points[k].first);
            curve.points[k].second +=
                static_cast<double>(it - rel.begin()) / nu / static_cast<double>(runs.size());
        }
    }
    return curve;
}

/// Empirical P(T_ij > t): the fraction of the pair's observed intercontact
/// times strictly exceeding t. Pairs that never produced an intercontact
/// sample count as 1 (never observed to re-meet within any horizon).
inline double pair_survival(const Trace &trace, user_id i, user_id j, double t_s) {
    const auto icts = trace.intercontact_times(i, j);
    if (icts.empty())
        return 1.0;
    std::size_t above = 0;
    for (const double v : icts)
        above += (v > t_s);
    return static_cast<double>(above) / static_cast<double>(icts.size());
}

/// C_i = 1 - mean_j P(T_ij > t): nodes that re-meet everyone quickly score
/// near 1, isolated nodes score 0.
inline double centrality(const Trace &trace, user_id i, double t_s) {
    const int n = trace.n_users();
    if (i < 0 || i >= n)
        throw query_error("centrality: unknown user id");
    double sum = 0.0;
    for (user_id j = 0; j < n; ++j) {
        if (j == i)
            continue;
        sum += pair_survival(trace, std::min(i, j), std::max(i, j), t_s);
    }
    return 1.0 - sum / static_cast<double>(n - 1);
}

inline CentralityVector centrality_vector(const Trace &trace, double t_s) {
    CentralityVector out;
    out.horizon_s = t_s;
    out.values.reserve(static_cast<std::size_t>(trace.n_users()));
    for (user_id i = 0; i < trace.n_users(); ++i)
        out.values.push_back(centrality(trace, i, t_s));
    return out;
}

enum class BlacklistMode { centrality, random };

/// Shared knobs for the averaged broadcast experiments.
struct ExperimentOptions {
    int runs = 200;
    double horizon_s = 86400.0;       // curve length per run
    double start_time_of_day_s = 21600.0; // 6:00
    double centrality_t_s = 6.0 * 86400.0; // survival horizon for the ranking
    std::uint64_t seed = 1;
    BlacklistPolicy blacklist_policy = BlacklistPolicy::halt_transmission;
};

namespace detail {

/// Start days are drawn uniformly from {0, ..., d_sim - 2} so a full horizon
/// fits; run r uses substream r, keeping arms of paired experiments aligned.
inline double draw_start_day(const Trace &trace, RandomStream &stream) {
    const int last = std::max(trace.meta().d_sim_days - 1, 1);
    const auto day = std::min<std::int64_t>(
        static_cast<std::int64_t>(stream.next_double() * last), last - 1);
    return static_cast<double>(day) * static_cast<double>(trace.meta().d_day_s);
}

inline user_id draw_node(int n_users, const std::set<user_id> &excluded, RandomStream &stream) {
    for (;;) {
        const auto u = std::min<user_id>(
            static_cast<user_id>(stream.next_double() * n_users), n_users - 1);
        if (!excluded.contains(u))
            return u;
    }
}

} // namespace detail

/// Averaged infection curve with k transmission-halted nodes: either the top-k
/// nodes by centrality over the whole trace, or k nodes redrawn at random
/// every run. Seed nodes are drawn among the non-blacklisted.
inline InfectionCurve blacklist_experiment(const Trace &trace, int k, BlacklistMode mode,
                                           const ExperimentOptions &opt = {}) {
    if (k < 0 || k >= trace.n_users())
        throw query_error("blacklist_experiment: k must be in [0, n_users)");
    std::set<user_id> top;
    if (mode == BlacklistMode::centrality && k > 0) {
        const CentralityVector cv = centrality_vector(trace, opt.centrality_t_s);
        std::vector<user_id> order(cv.values.size());
        for (std::size_t u = 0; u < order.size(); ++u)
            order[u] = static_cast<user_id>(u);
        std::stable_sort(order.begin(), order.end(), [&](user_id a, user_id b) {
            return cv.values[static_cast<std::size_t>(a)] > cv.values[static_cast<std::size_t>(b)];
        });
        top.insert(order.begin(), order.begin() + k);
    }
    std::vector<EpidemicRun> runs;
    runs.reserve(static_cast<std::size_t>(opt.runs));
    for (int r = 0; r < opt.runs; ++r) {
        RandomStream stream(opt.seed, run_substream(StreamDomain::epidemic,
                                                    static_cast<std::uint64_t>(r)));
        const double t0 = detail::draw_start_day(trace, stream) + opt.start_time_of_day_s;
        std::set<user_id> bl = top;
        if (mode == BlacklistMode::random) {
            while (static_cast<int>(bl.size()) < k)
                bl.insert(detail::draw_node(trace.n_users(), bl, stream));
        }
        const user_id seed_node = detail::draw_node(trace.n_users(), bl, stream);
        runs.push_back(run_epidemic(trace, seed_node, t0, bl, opt.blacklist_policy));
    }
    return infection_curve(runs, opt.horizon_s, trace.granularity_s());
}

/// One averaged curve per start time of day; run r of every arm shares the
/// same start-day and seed-node draws.
inline std::vector<InfectionCurve> start_time_experiment(const Trace &trace,
                                                         const std::vector<double> &times_of_day_s,
                                                         const ExperimentOptions &opt = {}) {
    std::vector<std::pair<double, user_id>> draws;
    draws.reserve(static_cast<std::size_t>(opt.runs));
    for (int r = 0; r < opt.runs; ++r) {
        RandomStream stream(opt.seed, run_substream(StreamDomain::epidemic,
                                                    static_cast<std::uint64_t>(r)));
        draws.emplace_back(detail::draw_start_day(trace, stream),
                           detail::draw_node(trace.n_users(), {}, stream));
    }
    std::vector<InfectionCurve> out;
    out.reserve(times_of_day_s.size());
    for (const double tod : times_of_day_s) {
        std::vector<EpidemicRun> runs;
        runs.reserve(draws.size());
        for (const auto &[day_s, node] : draws)
            runs.push_back(run_epidemic(trace, node, day_s + tod));
        out.push_back(infection_curve(runs, opt.horizon_s, trace.granularity_s()));
    }
    return out;
}

} // namespace ictsim
