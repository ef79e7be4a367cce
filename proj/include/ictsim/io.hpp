#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ictsim/common.hpp"
#include "ictsim/config.hpp"
#include "ictsim/epidemic.hpp"
#include "ictsim/stats.hpp"
#include "ictsim/trace.hpp"

namespace ictsim {

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(delim, pos);
        if (next == std::string_view::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

template <typename T>
T parse_int(std::string_view s, std::size_t line) {
    T v{};
    const auto *b = s.data();
    const auto *e = s.data() + s.size();
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc{} || res.ptr != e)
        throw parse_error("expected integer, got '" + std::string(s) + "'", line);
    return v;
}

inline double parse_double(std::string_view s, std::size_t line) {
    try {
        std::size_t used = 0;
        const std::string tmp(s);
        const double v = std::stod(tmp, &used);
        if (used != tmp.size())
            throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception &) {
        throw parse_error("expected number, got '" + std::string(s) + "'", line);
    }
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

} // namespace detail

// ---- trace files -----------------------------------------------------------
//
// Text format: `# key=value` metadata lines, then one `i,j,start,end` row per
// event with times in integer seconds, sorted by (start, i, j). Writing the
// same trace twice produces identical bytes.

inline std::size_t write_trace(const Trace &trace, std::ostream &os) {
    const auto &m = trace.meta();
    std::ostringstream out;
    out << "# n_users=" << m.n_users << '\n';
    out << "# d_sim=" << m.d_sim_days << '\n';
    out << "# d_day=" << m.d_day_s << '\n';
    out << "# granularity=" << m.granularity_s << '\n';
    out << "# seed=" << m.seed << '\n';
    out << "# variant=" << to_string(m.variant) << '\n';
    out << "# version=" << m.version << '\n';
    for (const auto &e : trace.events())
        out << e.i << ',' << e.j << ',' << e.start * m.granularity_s << ','
            << e.end * m.granularity_s << '\n';
    const std::string s = out.str();
    os << s;
    return s.size();
}

inline std::size_t write_trace(const Trace &trace, const std::string &path) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw error("cannot open '" + path + "' for writing");
    return write_trace(trace, f);
}

inline Trace read_trace(std::istream &is) {
    TraceMeta meta;
    std::map<std::string, bool> seen;
    std::vector<ContactEvent> events;
    std::string line;
    std::size_t line_no = 0;
    bool in_body = false;
    tick_t prev_start = -1;
    user_id prev_i = -1, prev_j = -1;
    while (std::getline(is, line)) {
        ++line_no;
        const auto t = detail::trim(line);
        if (t.empty())
            continue;
        if (t.front() == '#') {
            if (in_body)
                throw parse_error("metadata after body", line_no);
            auto kv = detail::trim(t.substr(1));
            const auto eq = kv.find('=');
            if (eq == std::string_view::npos)
                throw parse_error("malformed metadata line", line_no);
            const std::string key(detail::trim(kv.substr(0, eq)));
            const auto val = detail::trim(kv.substr(eq + 1));
            seen[key] = true;
            if (key == "n_users")
                meta.n_users = detail::parse_int<int>(val, line_no);
            else if (key == "d_sim")
                meta.d_sim_days = detail::parse_int<int>(val, line_no);
            else if (key == "d_day")
                meta.d_day_s = detail::parse_int<std::int64_t>(val, line_no);
            else if (key == "granularity")
                meta.granularity_s = detail::parse_int<std::int64_t>(val, line_no);
            else if (key == "seed")
                meta.seed = detail::parse_int<std::uint64_t>(val, line_no);
            else if (key == "variant")
                meta.variant = variant_from_string(std::string(val));
            else if (key == "version")
                meta.version = std::string(val);
            else
                throw parse_error("unknown metadata key '" + key + "'", line_no);
            continue;
        }
        if (!in_body) {
            for (const char *key : {"n_users", "d_sim", "d_day", "granularity", "seed", "variant",
                                    "version"})
                if (!seen[key])
                    throw parse_error(std::string("missing metadata key '") + key + "'", line_no);
            in_body = true;
        }
        const auto cols = detail::split(t, ',');
        if (cols.size() != 4)
            throw parse_error("expected 4 columns i,j,start,end", line_no);
        ContactEvent e;
        e.i = detail::parse_int<user_id>(detail::trim(cols[0]), line_no);
        e.j = detail::parse_int<user_id>(detail::trim(cols[1]), line_no);
        const auto start_s = detail::parse_int<std::int64_t>(detail::trim(cols[2]), line_no);
        const auto end_s = detail::parse_int<std::int64_t>(detail::trim(cols[3]), line_no);
        if (start_s % meta.granularity_s != 0 || end_s % meta.granularity_s != 0)
            throw parse_error("times must be multiples of the granularity", line_no);
        e.start = start_s / meta.granularity_s;
        e.end = end_s / meta.granularity_s;
        if (e.start > prev_start || (e.start == prev_start && (e.i > prev_i || (e.i == prev_i && e.j > prev_j)))) {
            prev_start = e.start;
            prev_i = e.i;
            prev_j = e.j;
        } else {
            throw parse_error("rows not sorted by (start,i,j)", line_no);
        }
        events.push_back(e);
    }
    if (!in_body) {
        for (const char *key : {"n_users", "d_sim", "d_day", "granularity", "seed", "variant",
                                "version"})
            if (!seen[key])
                throw parse_error(std::string("missing metadata key '") + key + "'", line_no);
    }
    try {
        return Trace::assemble(meta, std::move(events));
    } catch (const config_error &e) {
        throw parse_error(e.what(), 0);
    }
}

inline Trace read_trace(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw error("cannot open trace file '" + path + "'");
    return read_trace(f);
}

// ---- config files ----------------------------------------------------------
//
// Flat key=value text; '#' starts a comment. Every key below is required,
// anything else is rejected.

inline SimConfig load_config(std::istream &is) {
    SimConfig c;
    std::map<std::string, bool> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        auto t = detail::trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw parse_error("expected key=value", line_no);
        const std::string key(detail::trim(t.substr(0, eq)));
        const auto val = detail::trim(t.substr(eq + 1));
        if (seen[key])
            throw parse_error("duplicate key '" + key + "'", line_no);
        seen[key] = true;
        if (key == "users")
            c.n_users = detail::parse_int<int>(val, line_no);
        else if (key == "d_sim_days")
            c.d_sim_days = detail::parse_int<int>(val, line_no);
        else if (key == "d_day_s")
            c.d_day_s = detail::parse_int<std::int64_t>(val, line_no);
        else if (key == "mu_day_s")
            c.mu_day_s = detail::parse_double(val, line_no);
        else if (key == "sigma_day_s")
            c.sigma_day_s = detail::parse_double(val, line_no);
        else if (key == "granularity_s")
            c.granularity_s = detail::parse_int<std::int64_t>(val, line_no);
        else if (key == "T_s")
            c.t_threshold_s = detail::parse_double(val, line_no);
        else if (key == "gamma_a")
            c.gamma.shape = detail::parse_double(val, line_no);
        else if (key == "gamma_b")
            c.gamma.rate = detail::parse_double(val, line_no);
        else if (key == "T_e")
            c.t_e = detail::parse_double(val, line_no);
        else if (key == "alpha_ict")
            c.alpha_ict = detail::parse_double(val, line_no);
        else if (key == "alpha_c")
            c.alpha_c = detail::parse_double(val, line_no);
        else if (key == "seed")
            c.seed = detail::parse_int<std::uint64_t>(val, line_no);
        else if (key == "variant")
            c.variant = variant_from_string(std::string(val));
        else
            throw parse_error("unknown config key '" + key + "'", line_no);
    }
    for (const char *key : {"users", "d_sim_days", "d_day_s", "mu_day_s", "sigma_day_s",
                            "granularity_s", "T_s", "gamma_a", "gamma_b", "T_e", "alpha_ict",
                            "alpha_c", "seed", "variant"})
        if (!seen[key])
            throw parse_error(std::string("missing config key '") + key + "'");
    try {
        c.validate();
    } catch (const config_error &e) {
        throw parse_error(e.what());
    }
    return c;
}

inline SimConfig load_config(const std::string &path) {
    std::ifstream f(path);
    if (!f)
        throw error("cannot open config file '" + path + "'");
    return load_config(f);
}

inline void save_config(const SimConfig &c, std::ostream &os) {
    os << "users=" << c.n_users << '\n'
       << "d_sim_days=" << c.d_sim_days << '\n'
       << "d_day_s=" << c.d_day_s << '\n'
       << "mu_day_s=" << detail::fmt_double(c.mu_day_s) << '\n'
       << "sigma_day_s=" << detail::fmt_double(c.sigma_day_s) << '\n'
       << "granularity_s=" << c.granularity_s << '\n'
       << "T_s=" << detail::fmt_double(c.t_threshold_s) << '\n'
       << "gamma_a=" << detail::fmt_double(c.gamma.shape) << '\n'
       << "gamma_b=" << detail::fmt_double(c.gamma.rate) << '\n'
       << "T_e=" << detail::fmt_double(c.t_e) << '\n'
       << "alpha_ict=" << detail::fmt_double(c.alpha_ict) << '\n'
       << "alpha_c=" << detail::fmt_double(c.alpha_c) << '\n'
       << "seed=" << c.seed << '\n'
       << "variant=" << to_string(c.variant) << '\n';
}

// ---- external contact-dataset import ---------------------------------------

struct ImportSpec {
    int col_i = 0;
    int col_j = 1;
    int col_start = 2;
    int col_end = 3;
    bool has_header = false;
    char delimiter = ',';
    double time_scale = 1.0;          // multiply raw times into seconds
    std::int64_t granularity_s = 300; // grid to quantize onto
    std::int64_t d_day_s = 86400;
};

/// Imports a generic contact CSV: validates, quantizes onto the declared
/// grid (start down, end up), sorts and merges overlapping or touching rows
/// of the same pair so the result satisfies every trace invariant.
inline Trace import_contacts(std::istream &is, const ImportSpec &spec) {
    if (spec.granularity_s <= 0 || spec.d_day_s <= 0 || spec.d_day_s % spec.granularity_s != 0)
        throw error("import: d_day_s must be a positive multiple of granularity_s");
    const int max_col = std::max({spec.col_i, spec.col_j, spec.col_start, spec.col_end});
    std::map<PairKey, std::vector<std::pair<tick_t, tick_t>>> by_pair;
    std::string line;
    std::size_t line_no = 0;
    user_id max_user = -1;
    tick_t max_end = 0;
    const double g = static_cast<double>(spec.granularity_s);
    while (std::getline(is, line)) {
        ++line_no;
        if (spec.has_header && line_no == 1)
            continue;
        const auto t = detail::trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto cols = detail::split(t, spec.delimiter);
        if (static_cast<int>(cols.size()) <= max_col)
            throw parse_error("row has fewer columns than the mapping requires", line_no);
        user_id i = detail::parse_int<user_id>(detail::trim(cols[static_cast<std::size_t>(spec.col_i)]), line_no);
        user_id j = detail::parse_int<user_id>(detail::trim(cols[static_cast<std::size_t>(spec.col_j)]), line_no);
        double start = detail::parse_double(detail::trim(cols[static_cast<std::size_t>(spec.col_start)]), line_no) * spec.time_scale;
        double end = detail::parse_double(detail::trim(cols[static_cast<std::size_t>(spec.col_end)]), line_no) * spec.time_scale;
        if (i < 0 || j < 0 || i == j)
            throw parse_error("bad user pair", line_no);
        if (end < start)
            throw parse_error("negative contact duration", line_no);
        if (start < 0.0)
            throw parse_error("negative contact time", line_no);
        if (i > j)
            std::swap(i, j);
        auto st = static_cast<tick_t>(std::floor(start / g));
        auto en = static_cast<tick_t>(std::ceil(end / g));
        if (en <= st)
            en = st + 1;
        by_pair[{i, j}].emplace_back(st, en);
        max_user = std::max({max_user, i, j});
        max_end = std::max(max_end, en);
    }
    std::vector<ContactEvent> events;
    for (auto &[key, rows] : by_pair) {
        std::sort(rows.begin(), rows.end());
        std::vector<std::pair<tick_t, tick_t>> merged;
        for (const auto &[s, e] : rows) {
            // gap of zero ticks would read as a zero intercontact time
            if (!merged.empty() && s - merged.back().second < 1)
                merged.back().second = std::max(merged.back().second, e);
            else
                merged.emplace_back(s, e);
        }
        for (const auto &[s, e] : merged)
            events.push_back({key.first, key.second, s, e});
    }
    TraceMeta meta;
    meta.n_users = static_cast<int>(max_user) + 1;
    meta.granularity_s = spec.granularity_s;
    meta.d_day_s = spec.d_day_s;
    const auto ticks_per_day = spec.d_day_s / spec.granularity_s;
    meta.d_sim_days = static_cast<int>((max_end + ticks_per_day - 1) / ticks_per_day);
    if (meta.n_users < 2)
        meta.n_users = 2;
    if (meta.d_sim_days < 1)
        meta.d_sim_days = 1;
    meta.seed = 0;
    meta.variant = Variant::piecewise;
    return Trace::assemble(meta, std::move(events));
}

inline Trace import_contacts(const std::string &path, const ImportSpec &spec) {
    std::ifstream f(path);
    if (!f)
        throw error("cannot open contacts file '" + path + "'");
    return import_contacts(f, spec);
}

// ---- CSV emitters ----------------------------------------------------------

inline void write_ccdf_csv(const Ccdf &ccdf, std::ostream &os) {
    os << "t_seconds,ccdf\n";
    for (const auto &[t, p] : ccdf.points)
        os << detail::fmt_double(t) << ',' << detail::fmt_double(p) << '\n';
}

inline Ccdf read_ccdf_csv(std::istream &is) {
    Ccdf out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto t = detail::trim(line);
        if (t.empty() || (line_no == 1 && t.rfind("t_seconds", 0) == 0))
            continue;
        const auto cols = detail::split(t, ',');
        if (cols.size() != 2)
            throw parse_error("expected t_seconds,ccdf", line_no);
        out.points.emplace_back(detail::parse_double(detail::trim(cols[0]), line_no),
                                detail::parse_double(detail::trim(cols[1]), line_no));
    }
    if (out.points.empty())
        throw parse_error("empty ccdf file");
    return out;
}

inline Ccdf read_ccdf_csv(const std::string &path) {
    std::ifstream f(path);
    if (!f)
        throw error("cannot open ccdf file '" + path + "'");
    return read_ccdf_csv(f);
}

inline void write_curve_csv(const InfectionCurve &curve, std::ostream &os) {
    os << "t_seconds,fraction\n";
    for (const auto &[t, f] : curve.points)
        os << detail::fmt_double(t) << ',' << detail::fmt_double(f) << '\n';
}

inline void write_centrality_csv(const CentralityVector &cv, std::ostream &os) {
    os << "user_id,centrality\n";
    for (std::size_t u = 0; u < cv.values.size(); ++u)
        os << u << ',' << detail::fmt_double(cv.values[u]) << '\n';
}

} // namespace ictsim
