#pragma once

#include <concepts>
#include <cstdint>

#include "ictsim/common.hpp"

namespace ictsim {

/// Anything that yields i.i.d. uniforms on [0,1). Samplers are templated on
/// this so tests can feed predetermined draws.
template <typename S>
concept UniformSource = requires(S s) {
    { s.next_double() } -> std::convertible_to<double>;
};

namespace detail {

// splitmix64 finalizer; bijective, passes the usual mixer test batteries.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

} // namespace detail

/// Deterministic counter-based random stream. The i-th output is a pure
/// function of (seed, substream_id, i), so streams can be created per pair or
/// per experiment run in any order, on any thread, with identical results.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t substream_id)
        : base_(detail::mix64(detail::mix64(seed + detail::kGolden) ^
                              detail::mix64(substream_id + 0x7F4A7C15ULL))) {}

    std::uint64_t next_u64() {
        counter_ += detail::kGolden;
        return detail::mix64(base_ + counter_);
    }

    /// Uniform on [0,1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

static_assert(UniformSource<RandomStream>);

/// Substream id namespaces. Keeps pair-generation streams disjoint from
/// experiment streams under one seed.
enum class StreamDomain : std::uint64_t {
    pair_params = 1,
    pair_schedule = 2,
    epidemic = 3,
};

/// Substream for a per-pair draw. Unique for i < j < n_users < 2^24.
inline std::uint64_t pair_substream(StreamDomain d, user_id i, user_id j, int n_users) {
    return (static_cast<std::uint64_t>(d) << 56) |
           (static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n_users) +
            static_cast<std::uint64_t>(j));
}

/// Substream for the k-th run of an experiment.
inline std::uint64_t run_substream(StreamDomain d, std::uint64_t run_index) {
    return (static_cast<std::uint64_t>(d) << 56) | run_index;
}

} // namespace ictsim
