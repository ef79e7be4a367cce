#pragma once

#include <vector>

#include "ictsim/config.hpp"
#include "ictsim/pairgen.hpp"
#include "ictsim/random.hpp"
#include "ictsim/trace.hpp"

namespace ictsim {

struct GenerationResult {
    Trace trace;
    std::vector<PairParams> params; // one entry per pair, (i, j) order
};

/// Full pipeline: per-pair parameter draws, per-pair schedules, one merged
/// trace. Each pair owns two substreams keyed by its index, so results do not
/// depend on generation order.
inline GenerationResult generate_trace(const SimConfig &config) {
    config.validate();
    GenerationResult out;
    LambdaCache cache;
    std::vector<std::vector<ContactEvent>> schedules;
    const int n = config.n_users;
    out.params.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    schedules.reserve(out.params.capacity());
    for (user_id i = 0; i < n; ++i) {
        for (user_id j = i + 1; j < n; ++j) {
            RandomStream param_stream(config.seed,
                                      pair_substream(StreamDomain::pair_params, i, j, n));
            const PairParams p = draw_pair_params(config, i, j, param_stream, &cache);
            RandomStream sched_stream(config.seed,
                                      pair_substream(StreamDomain::pair_schedule, i, j, n));
            if (config.variant == Variant::exponential_pairwise)
                schedules.push_back(generate_pair_schedule_exponential(config, p, sched_stream));
            else
                schedules.push_back(generate_pair_schedule(config, p, sched_stream));
            out.params.push_back(p);
        }
    }
    out.trace = assemble_trace(config, schedules);
    return out;
}

} // namespace ictsim
