#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ictsim/common.hpp"
#include "ictsim/config.hpp"

namespace ictsim {

/// One contact between users i < j, in granularity ticks, with start < end.
/// Seconds = tick * granularity_s of the owning trace or config.
struct ContactEvent {
    user_id i;
    user_id j;
    tick_t start;
    tick_t end;
};

struct TraceMeta {
    int n_users = 0;
    int d_sim_days = 0;
    std::int64_t d_day_s = 86400;
    std::int64_t granularity_s = 300;
    std::uint64_t seed = 0;
    Variant variant = Variant::piecewise;
    std::string version = kVersion;

    double duration_s() const { return static_cast<double>(d_sim_days) * static_cast<double>(d_day_s); }
    tick_t duration_ticks() const {
        return static_cast<tick_t>(d_sim_days) * (d_day_s / granularity_s);
    }
};

using PairKey = std::pair<user_id, user_id>;

/// The assembled time-varying contact graph: every pair's events merged into
/// one list sorted by (start, i, j), with a per-pair index for queries.
/// Immutable after construction; concurrent reads are safe.
class Trace {
public:
    Trace() = default;

    /// Validates and adopts pre-sorted-per-pair schedules. Throws on any
    /// schedule that violates the per-pair invariants, naming the pair.
    static Trace assemble(const TraceMeta &meta, std::vector<ContactEvent> events) {
        Trace t;
        t.meta_ = meta;
        t.events_ = std::move(events);
        std::stable_sort(t.events_.begin(), t.events_.end(),
                         [](const ContactEvent &a, const ContactEvent &b) {
                             if (a.start != b.start)
                                 return a.start < b.start;
                             if (a.i != b.i)
                                 return a.i < b.i;
                             return a.j < b.j;
                         });
        t.build_index();
        t.check_invariants();
        return t;
    }

    const TraceMeta &meta() const { return meta_; }
    const std::vector<ContactEvent> &events() const { return events_; }
    int n_users() const { return meta_.n_users; }
    double granularity_s() const { return static_cast<double>(meta_.granularity_s); }

    double start_s(const ContactEvent &e) const { return static_cast<double>(e.start) * granularity_s(); }
    double end_s(const ContactEvent &e) const { return static_cast<double>(e.end) * granularity_s(); }

    /// Edge activity at time t (seconds): true iff start < t <= end for some
    /// event of the pair. Note the boundary: a contact is not yet active at
    /// its own start instant and still active at its end instant.
    bool edge_active(user_id i, user_id j, double t_s) const {
        const auto *evs = pair_intervals(i, j);
        if (!evs)
            return false;
        for (const auto &[s, e] : *evs) {
            if (static_cast<double>(s) * granularity_s() < t_s &&
                t_s <= static_cast<double>(e) * granularity_s())
                return true;
        }
        return false;
    }

    /// Gap lengths (seconds) between consecutive contacts of the pair; empty
    /// unless the pair met at least twice.
    std::vector<double> intercontact_times(user_id i, user_id j) const {
        const auto *evs = pair_intervals(i, j);
        std::vector<double> out;
        if (!evs || evs->size() < 2)
            return out;
        out.reserve(evs->size() - 1);
        for (std::size_t k = 1; k < evs->size(); ++k)
            out.push_back(static_cast<double>((*evs)[k].first - (*evs)[k - 1].second) *
                          granularity_s());
        return out;
    }

    std::int64_t contact_count(user_id i, user_id j) const {
        const auto *evs = pair_intervals(i, j);
        return evs ? static_cast<std::int64_t>(evs->size()) : 0;
    }

    /// All pairs with an active edge at time t (edge_active semantics).
    std::set<PairKey> active_pairs(double t_s) const {
        std::set<PairKey> out;
        for (const auto &e : events_) {
            if (start_s(e) < t_s && t_s <= end_s(e))
                out.insert({e.i, e.j});
        }
        return out;
    }

    /// Per-pair interval lists in deterministic (i, j) order.
    const std::map<PairKey, std::vector<std::pair<tick_t, tick_t>>> &pairs() const { return index_; }

private:
    void check_user(user_id u) const {
        if (u < 0 || u >= meta_.n_users)
            throw query_error("unknown user id " + std::to_string(u));
    }

    const std::vector<std::pair<tick_t, tick_t>> *pair_intervals(user_id i, user_id j) const {
        check_user(i);
        check_user(j);
        if (i > j)
            std::swap(i, j);
        const auto it = index_.find({i, j});
        return it == index_.end() ? nullptr : &it->second;
    }

    void build_index() {
        index_.clear();
        for (const auto &e : events_)
            index_[{e.i, e.j}].emplace_back(e.start, e.end);
    }

    void check_invariants() const {
        const tick_t horizon = meta_.duration_ticks();
        for (const auto &[key, evs] : index_) {
            const auto label = pair_label(key.first, key.second);
            if (key.first < 0 || key.second >= meta_.n_users || key.first >= key.second)
                throw config_error("trace assembly: bad pair " + label);
            tick_t prev_end = -1;
            for (const auto &[s, e] : evs) {
                if (s < 0 || e > horizon || s >= e)
                    throw config_error("trace assembly: bad event interval for pair " + label);
                if (prev_end >= 0 && s - prev_end < 1)
                    throw config_error("trace assembly: overlapping or touching events for pair " +
                                       label);
                prev_end = e;
            }
        }
    }

    TraceMeta meta_;
    std::vector<ContactEvent> events_;
    std::map<PairKey, std::vector<std::pair<tick_t, tick_t>>> index_;
};

/// Merges per-pair schedules into one trace. Deterministic: identical inputs
/// give identical event order.
inline Trace assemble_trace(const SimConfig &config,
                            const std::vector<std::vector<ContactEvent>> &schedules) {
    config.validate();
    TraceMeta meta;
    meta.n_users = config.n_users;
    meta.d_sim_days = config.d_sim_days;
    meta.d_day_s = config.d_day_s;
    meta.granularity_s = config.granularity_s;
    meta.seed = config.seed;
    meta.variant = config.variant;
    std::size_t total = 0;
    for (const auto &s : schedules)
        total += s.size();
    std::vector<ContactEvent> all;
    all.reserve(total);
    for (const auto &s : schedules)
        all.insert(all.end(), s.begin(), s.end());
    return Trace::assemble(meta, std::move(all));
}

} // namespace ictsim
