// ictsim command-line front end: trace generation, distribution analysis,
// trace comparison and the epidemic-routing experiments, all emitting
// plot-ready CSV.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ictsim/epidemic.hpp"
#include "ictsim/generator.hpp"
#include "ictsim/io.hpp"
#include "ictsim/stats.hpp"

using namespace ictsim;

namespace {

std::string default_config_path() {
    const char *env = std::getenv("ICTSIM_CONFIG");
    return env ? env : "";
}

std::uint64_t seed_or_entropy(std::optional<std::uint64_t> seed) {
    if (seed)
        return *seed;
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cout << "seed drawn from entropy: " << s << "\n";
    return s;
}

void write_text_file(const std::string &path, const std::function<void(std::ostream &)> &fn) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw error("cannot open '" + path + "' for writing");
    fn(f);
}

double parse_time_of_day(const std::string &spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        return std::stod(spec); // plain seconds
    const int hours = std::stoi(spec.substr(0, colon));
    const int minutes = std::stoi(spec.substr(colon + 1));
    if (hours < 0 || hours > 23 || minutes < 0 || minutes > 59)
        throw error("bad time of day '" + spec + "'");
    return hours * 3600.0 + minutes * 60.0;
}

int cmd_generate(const std::string &config_path, const std::string &out_path,
                 std::optional<std::uint64_t> seed, bool no_periodic,
                 const std::string &variant_override) {
    SimConfig cfg = load_config(config_path);
    if (seed)
        cfg.seed = *seed;
    if (no_periodic)
        cfg.periodic = false;
    if (!variant_override.empty())
        cfg.variant = variant_from_string(variant_override);
    const auto t0 = std::chrono::steady_clock::now();
    const GenerationResult r = generate_trace(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_trace(r.trace, out_path);
    std::cout << "generated " << r.trace.events().size() << " events ("
              << r.trace.pairs().size() << " active pairs) in " << secs << " s -> " << out_path
              << "\n";
    return 0;
}

int cmd_analyze(const std::string &trace_path, const std::string &ccdf_out) {
    const Trace t = read_trace(trace_path);
    std::cout << "events: " << t.events().size() << "\n";
    std::cout << "zero_contact_fraction: " << zero_contact_fraction(t) << "\n";
    try {
        std::cout << "periodicity_score: " << periodicity_score(t) << "\n";
    } catch (const data_error &e) {
        std::cout << "periodicity_score: unavailable (" << e.what() << ")\n";
    }
    const Ccdf ccdf = aggregate_ccdf(t);
    std::cout << "ict_samples: " << [&] {
        std::size_t n = 0;
        for (const auto &[k, evs] : t.pairs())
            n += evs.size() < 2 ? 0 : evs.size() - 1;
        return n;
    }() << "\n";
    if (!ccdf_out.empty()) {
        write_text_file(ccdf_out, [&](std::ostream &os) { write_ccdf_csv(ccdf, os); });
        std::cout << "ccdf -> " << ccdf_out << "\n";
    }
    return 0;
}

int cmd_compare(const std::string &trace_a, const std::string &trace_b,
                const std::string &ref_ccdf, int grid_points) {
    const Trace a = read_trace(trace_a);
    const Ccdf model = aggregate_ccdf(a);
    Ccdf reference;
    if (!ref_ccdf.empty())
        reference = read_ccdf_csv(ref_ccdf);
    else
        reference = aggregate_ccdf(read_trace(trace_b));
    const ComparisonReport rep = compare_ccdf(model, reference, grid_points);
    std::cout << "{\"avg_rel_error\":" << rep.avg_rel_error
              << ",\"max_rel_error\":" << rep.max_rel_error
              << ",\"max_error_location_s\":" << rep.max_error_location << "}\n";
    if (ref_ccdf.empty()) {
        const ComparisonReport counts = contact_count_comparison(a, contact_counts(read_trace(trace_b)));
        std::cout << "{\"contact_count_avg_rel_error\":" << counts.avg_rel_error
                  << ",\"contact_count_max_rel_error\":" << counts.max_rel_error << "}\n";
    }
    return 0;
}

int cmd_epidemic(const std::string &trace_path, const std::string &out_path, int runs,
                 const std::string &t0_spec, double horizon_h,
                 std::optional<std::uint64_t> seed) {
    const Trace t = read_trace(trace_path);
    ExperimentOptions opt;
    opt.runs = runs;
    opt.horizon_s = horizon_h * 3600.0;
    opt.seed = seed_or_entropy(seed);
    opt.start_time_of_day_s = parse_time_of_day(t0_spec);
    const auto curves = start_time_experiment(t, {opt.start_time_of_day_s}, opt);
    write_text_file(out_path, [&](std::ostream &os) { write_curve_csv(curves[0], os); });
    std::cout << "averaged " << runs << " runs -> " << out_path << "\n";
    return 0;
}

int cmd_centrality(const std::string &trace_path, const std::string &out_path, double horizon_d) {
    const Trace t = read_trace(trace_path);
    const CentralityVector cv = centrality_vector(t, horizon_d * 86400.0);
    write_text_file(out_path, [&](std::ostream &os) { write_centrality_csv(cv, os); });
    std::cout << "centrality over t = " << horizon_d << " d -> " << out_path << "\n";
    return 0;
}

int cmd_blacklist(const std::string &trace_path, const std::string &out_prefix, int k, int runs,
                  const std::string &t0_spec, double horizon_h, const std::string &mode,
                  std::optional<std::uint64_t> seed) {
    const Trace t = read_trace(trace_path);
    ExperimentOptions opt;
    opt.runs = runs;
    opt.horizon_s = horizon_h * 3600.0;
    opt.seed = seed_or_entropy(seed);
    opt.start_time_of_day_s = parse_time_of_day(t0_spec);
    std::vector<std::string> emitted;
    if (mode == "centrality" || mode == "both") {
        const InfectionCurve c = blacklist_experiment(t, k, BlacklistMode::centrality, opt);
        write_text_file(out_prefix + "_centrality.csv",
                        [&](std::ostream &os) { write_curve_csv(c, os); });
        emitted.push_back(out_prefix + "_centrality.csv");
    }
    if (mode == "random" || mode == "both") {
        const InfectionCurve c = blacklist_experiment(t, k, BlacklistMode::random, opt);
        write_text_file(out_prefix + "_random.csv",
                        [&](std::ostream &os) { write_curve_csv(c, os); });
        emitted.push_back(out_prefix + "_random.csv");
    }
    if (emitted.empty())
        throw error("blacklist: mode must be centrality, random or both");
    std::cout << "blacklist k=" << k << " x " << runs << " runs ->";
    for (const auto &path : emitted)
        std::cout << ' ' << path;
    std::cout << "\n";
    return 0;
}

int cmd_start_times(const std::string &trace_path, const std::string &out_prefix,
                    const std::vector<std::string> &times, int runs, double horizon_h,
                    std::optional<std::uint64_t> seed) {
    const Trace t = read_trace(trace_path);
    ExperimentOptions opt;
    opt.runs = runs;
    opt.horizon_s = horizon_h * 3600.0;
    opt.seed = seed_or_entropy(seed);
    std::vector<double> tods;
    tods.reserve(times.size());
    for (const auto &spec : times)
        tods.push_back(parse_time_of_day(spec));
    const auto curves = start_time_experiment(t, tods, opt);
    for (std::size_t k = 0; k < curves.size(); ++k) {
        std::string label = times[k];
        for (auto &ch : label)
            if (ch == ':')
                ch = 'h';
        const std::string path = out_prefix + "_" + label + ".csv";
        write_text_file(path, [&](std::ostream &os) { write_curve_csv(curves[k], os); });
        std::cout << times[k] << " -> " << path << "\n";
    }
    return 0;
}

int cmd_validate(const std::string &trace_path) {
    const Trace t = read_trace(trace_path); // assembly re-checks every invariant
    std::size_t ict_samples = 0;
    for (const auto &[key, evs] : t.pairs())
        ict_samples += evs.size() < 2 ? 0 : evs.size() - 1;
    std::cout << "ok: " << t.events().size() << " events, " << t.pairs().size()
              << " active pairs, " << ict_samples << " intercontact samples, users 0.."
              << t.n_users() - 1 << "\n";
    std::cout << "invariants: sorted, non-overlapping, quantized, inside the horizon\n";
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"synthetic human-encounter traces and epidemic-routing replay"};
    app.require_subcommand(1);

    std::string config_path = default_config_path();
    std::string trace_path, trace_b, out_path, out_prefix, ref_ccdf, t0_spec = "06:00";
    std::string variant_override, bl_mode = "both";
    std::vector<std::string> times{"06:00", "18:00"};
    std::optional<std::uint64_t> seed;
    bool no_periodic = false;
    int runs = 200, k = 30, grid_points = 64;
    double horizon_h = 24.0, centrality_d = 6.0;

    auto *gen = app.add_subcommand("generate", "generate a trace from a model config");
    gen->add_option("-c,--config", config_path, "model config file (or $ICTSIM_CONFIG)");
    gen->add_option("-o,--out", out_path, "output trace file")->required();
    gen->add_option("--seed", seed, "override the config seed");
    gen->add_flag("--no-periodic", no_periodic, "disable the daily-anchoring terms");
    gen->add_option("--variant", variant_override, "piecewise | exponential-pairwise");

    auto *ana = app.add_subcommand("analyze", "summary statistics and aggregate CCDF");
    ana->add_option("-t,--trace", trace_path, "trace file")->required();
    ana->add_option("-o,--out-ccdf", out_path, "write the aggregate CCDF CSV here");

    auto *cmp = app.add_subcommand("compare", "relative-error report between distributions");
    cmp->add_option("-a,--trace-a", trace_path, "model trace")->required();
    cmp->add_option("-b,--trace-b", trace_b, "reference trace");
    cmp->add_option("--ref-ccdf", ref_ccdf, "reference CCDF CSV instead of a trace");
    cmp->add_option("--grid-points", grid_points, "log-spaced evaluation points");

    auto *epi = app.add_subcommand("epidemic", "averaged epidemic-routing infection curve");
    epi->add_option("-t,--trace", trace_path)->required();
    epi->add_option("-o,--out", out_path)->required();
    epi->add_option("--runs", runs, "number of averaged runs");
    epi->add_option("--t0", t0_spec, "start time of day (HH:MM), random start day per run");
    epi->add_option("--horizon", horizon_h, "curve length, hours");
    epi->add_option("--seed", seed, "experiment seed (entropy if omitted)");

    auto *cen = app.add_subcommand("centrality", "re-meeting centrality per user");
    cen->add_option("-t,--trace", trace_path)->required();
    cen->add_option("-o,--out", out_path)->required();
    cen->add_option("--horizon-days", centrality_d, "survival horizon t, days");

    auto *bl = app.add_subcommand("blacklist", "centrality vs random transmission halting");
    bl->add_option("-t,--trace", trace_path)->required();
    bl->add_option("-o,--out-prefix", out_prefix)->required();
    bl->add_option("-k,--blacklisted", k, "number of halted nodes");
    bl->add_option("--mode", bl_mode, "centrality | random | both");
    bl->add_option("--runs", runs);
    bl->add_option("--t0", t0_spec);
    bl->add_option("--horizon", horizon_h);
    bl->add_option("--seed", seed);

    auto *st = app.add_subcommand("start-times", "one averaged curve per start time of day");
    st->add_option("-t,--trace", trace_path)->required();
    st->add_option("-o,--out-prefix", out_prefix)->required();
    st->add_option("--times", times, "times of day, HH:MM");
    st->add_option("--runs", runs);
    st->add_option("--horizon", horizon_h);
    st->add_option("--seed", seed);

    auto *val = app.add_subcommand("validate", "check every trace-file invariant");
    val->add_option("-t,--trace", trace_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            if (config_path.empty())
                throw error("no config: pass --config or set ICTSIM_CONFIG");
            return cmd_generate(config_path, out_path, seed, no_periodic, variant_override);
        }
        if (ana->parsed())
            return cmd_analyze(trace_path, out_path);
        if (cmp->parsed()) {
            if (trace_b.empty() && ref_ccdf.empty())
                throw error("compare needs --trace-b or --ref-ccdf");
            return cmd_compare(trace_path, trace_b, ref_ccdf, grid_points);
        }
        if (epi->parsed())
            return cmd_epidemic(trace_path, out_path, runs, t0_spec, horizon_h, seed);
        if (cen->parsed())
            return cmd_centrality(trace_path, out_path, centrality_d);
        if (bl->parsed())
            return cmd_blacklist(trace_path, out_prefix, k, runs, t0_spec, horizon_h, bl_mode, seed);
        if (st->parsed())
            return cmd_start_times(trace_path, out_prefix, times, runs, horizon_h, seed);
        if (val->parsed())
            return cmd_validate(trace_path);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
