#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "ictsim/common.hpp"
#include "ictsim/distributions.hpp"

namespace ictsim {

enum class Variant {
    piecewise,            // power law with day-scale exponential decay per pair
    exponential_pairwise, // purely exponential pairwise gaps, rate = r_e
};

inline std::string to_string(Variant v) {
    return v == Variant::piecewise ? "piecewise" : "exponential-pairwise";
}

inline Variant variant_from_string(const std::string &s) {
    if (s == "piecewise")
        return Variant::piecewise;
    if (s == "exponential-pairwise")
        return Variant::exponential_pairwise;
    throw config_error("unknown variant '" + s + "'");
}

/// Global model parameters. Defaults follow the MIT-BT-scale setup except
/// alpha_ict / alpha_c, which no dataset fixes; both must be treated as free
/// knobs (see solve_lambda for the feasibility constraint alpha_ict imposes).
struct SimConfig {
    int n_users = 100;
    int d_sim_days = 100;            // experiment length, whole days
    std::int64_t d_day_s = 86400;    // day length, seconds
    double mu_day_s = 43200.0;       // preferred meeting time of day
    double sigma_day_s = 50.0;       // spread of the daily meeting window
    std::int64_t granularity_s = 300; // measurement floor; all times quantized to it
    double t_threshold_s = 6030.0;   // T: gap length where power law hands over to day-scale decay
    GammaParams gamma{0.19, 0.072};  // contact-budget distribution (expected contacts/pair)
    double t_e = 5.79e-7;            // T_e: frequent/sporadic contact-rate threshold, contacts/s
    double alpha_ict = 0.3;          // power-law exponent of short intercontact gaps
    double alpha_c = 1.8;            // power-law exponent of contact durations
    std::uint64_t seed = 1;
    Variant variant = Variant::piecewise;
    bool periodic = true;            // false: ablate the daily-anchoring terms

    double duration_s() const { return static_cast<double>(d_sim_days) * static_cast<double>(d_day_s); }
    tick_t duration_ticks() const {
        return static_cast<tick_t>(d_sim_days) * (d_day_s / granularity_s);
    }

    void validate() const {
        if (n_users < 2)
            throw config_error("config: n_users must be >= 2");
        if (n_users > (1 << 24))
            throw config_error("config: n_users too large");
        if (d_sim_days < 1)
            throw config_error("config: d_sim_days must be >= 1");
        if (granularity_s <= 0)
            throw config_error("config: granularity_s must be > 0");
        if (d_day_s <= 0 || d_day_s % granularity_s != 0)
            throw config_error("config: d_day_s must be a positive multiple of granularity_s");
        if (!(t_threshold_s >= static_cast<double>(granularity_s)))
            throw config_error("config: T_s must be >= granularity_s");
        if (!(mu_day_s > 0.0) || !(mu_day_s < static_cast<double>(d_day_s)))
            throw config_error("config: mu_day_s must lie strictly inside the day");
        if (!(sigma_day_s >= 0.0) || !std::isfinite(sigma_day_s))
            throw config_error("config: sigma_day_s must be >= 0");
        if (!(t_e > 0.0) || !std::isfinite(t_e))
            throw config_error("config: T_e must be > 0");
        if (!(alpha_ict > 0.0) || !(alpha_c > 0.0))
            throw config_error("config: alpha_ict and alpha_c must be > 0");
        gamma.validate();
    }
};

} // namespace ictsim
