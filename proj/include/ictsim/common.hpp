#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ictsim {

inline constexpr const char *kVersion = "0.1.0";

using user_id = std::int32_t;
using tick_t = std::int64_t;

/// Base class for everything this library throws.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid model or distribution parameters.
struct config_error : error {
    using error::error;
};

/// A pair's encounter budget cannot be met by any admissible rate.
struct calibration_error : error {
    using error::error;
};

/// Malformed file content; carries a 1-based line number when known.
struct parse_error : error {
    explicit parse_error(const std::string &msg, std::size_t line = 0)
        : error(line ? msg + " (line " + std::to_string(line) + ")" : msg), line_number(line) {}
    std::size_t line_number;
};

/// Query with arguments outside the trace (unknown user, time out of span).
struct query_error : error {
    using error::error;
};

/// Not enough data to compute the requested statistic.
struct data_error : error {
    using error::error;
};

inline std::string pair_label(user_id i, user_id j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

} // namespace ictsim
