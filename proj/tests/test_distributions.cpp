#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ictsim/distributions.hpp"
#include "ictsim/random.hpp"
#include "support.hpp"

using namespace ictsim;
using testsupport::ForcedStream;

namespace {

template <typename Fn>
std::vector<double> draw_many(std::size_t n, std::uint64_t substream, Fn &&sample) {
    RandomStream s(7771, substream);
    std::vector<double> xs;
    xs.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        xs.push_back(sample(s));
    return xs;
}

double mean_of(const std::vector<double> &xs) {
    double m = 0.0;
    for (const double x : xs)
        m += x;
    return m / static_cast<double>(xs.size());
}

} // namespace

TEST_CASE("pareto inverse CDF at pinned uniforms") {
    ForcedStream u0{{0.0}};
    REQUIRE(sample_pareto({1.0, 300.0}, u0) == 300.0);
    // u = 0.75 inverts CDF 1-(x_min/x)^alpha at x = 1200 for alpha = 1
    ForcedStream u1{{0.75}};
    REQUIRE(sample_pareto({1.0, 300.0}, u1) == Catch::Approx(1200.0));
}

TEST_CASE("pareto empirical tail matches the survival function") {
    const auto xs = draw_many(100000, 1, [](RandomStream &s) {
        return sample_pareto({1.5, 300.0}, s);
    });
    std::size_t above = 0;
    for (const double x : xs) {
        REQUIRE(x >= 300.0);
        above += (x > 3000.0);
    }
    const double p = std::pow(10.0, -1.5);
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(xs.size()));
    REQUIRE(std::abs(static_cast<double>(above) / static_cast<double>(xs.size()) - p) <
            3.0 * sigma);
}

TEST_CASE("pareto rejects bad parameters") {
    ForcedStream u{{0.5}};
    REQUIRE_THROWS_AS(sample_pareto({0.0, 300.0}, u), config_error);
    REQUIRE_THROWS_AS(sample_pareto({1.0, 0.0}, u), config_error);
}

TEST_CASE("gamma(1, 2) reduces to an exponential with mean one half") {
    const auto xs = draw_many(100000, 2, [](RandomStream &s) {
        return sample_gamma({1.0, 2.0}, s);
    });
    REQUIRE(mean_of(xs) == Catch::Approx(0.5).margin(0.02));
}

TEST_CASE("gamma(0.19, 0.072) sample mean and sub-1 mass") {
    const auto xs = draw_many(1000000, 3, [](RandomStream &s) {
        return sample_gamma({0.19, 0.072}, s);
    });
    const double m = mean_of(xs);
    REQUIRE(std::abs(m - 0.19 / 0.072) / (0.19 / 0.072) < 0.02);
    std::size_t below = 0;
    for (const double x : xs) {
        REQUIRE(x > 0.0);
        below += (x < 1.0);
    }
    const double frac = static_cast<double>(below) / static_cast<double>(xs.size());
    // quadrature of the shape-rate pdf over [0,1] gives 0.6513
    REQUIRE(frac > 0.55);
    REQUIRE(frac < 0.75);
    REQUIRE(frac == Catch::Approx(testsupport::gamma_cdf(1.0, 0.19, 0.072)).margin(0.005));
}

TEST_CASE("exponential sample mean at rate 2") {
    const auto xs = draw_many(100000, 4, [](RandomStream &s) {
        return sample_exponential(2.0, s);
    });
    REQUIRE(std::abs(mean_of(xs) - 0.5) / 0.5 < 0.02);
    for (const double x : xs)
        REQUIRE(x >= 0.0);
}

TEST_CASE("degenerate normal and uniform") {
    RandomStream s(1, 1);
    REQUIRE(sample_normal(43200.0, 0.0, s) == 43200.0);
    REQUIRE(sample_uniform(5.0, 5.0, s) == 5.0);
    ForcedStream u{{0.5}};
    REQUIRE_THROWS_AS(sample_uniform(2.0, 1.0, u), config_error);
    REQUIRE_THROWS_AS(sample_normal(0.0, -1.0, u), config_error);
    REQUIRE_THROWS_AS(sample_exponential(0.0, u), config_error);
}

TEST_CASE("normal consumes exactly two uniforms") {
    // cos(2*pi*0.25) = 0, so the value is mu no matter what u1 is
    ForcedStream u{{0.9, 0.25, 0.123}};
    REQUIRE(sample_normal(10.0, 3.0, u) == Catch::Approx(10.0).margin(1e-12));
    REQUIRE(u.next == 2);
}

TEST_CASE("Kolmogorov-Smirnov against analytic CDFs at significance 0.01") {
    const std::size_t n = 100000;
    const double crit = testsupport::ks_critical_01(n);

    auto ks = [&](auto sampler, auto cdf, std::uint64_t sub) {
        return testsupport::ks_statistic(draw_many(n, sub, sampler), cdf);
    };

    REQUIRE(ks([](RandomStream &s) { return sample_pareto({1.5, 300.0}, s); },
               [](double x) { return testsupport::pareto_cdf(x, 1.5, 300.0); }, 10) < crit);
    REQUIRE(ks([](RandomStream &s) { return sample_exponential(0.7, s); },
               [](double x) { return testsupport::exponential_cdf(x, 0.7); }, 11) < crit);
    REQUIRE(ks([](RandomStream &s) { return sample_uniform(-2.0, 5.0, s); },
               [](double x) { return testsupport::uniform_cdf(x, -2.0, 5.0); }, 12) < crit);
    REQUIRE(ks([](RandomStream &s) { return sample_normal(100.0, 15.0, s); },
               [](double x) { return testsupport::normal_cdf(x, 100.0, 15.0); }, 13) < crit);
    REQUIRE(ks([](RandomStream &s) { return sample_gamma({0.19, 0.072}, s); },
               [](double x) { return testsupport::gamma_cdf(x, 0.19, 0.072); }, 14) < crit);
    REQUIRE(ks([](RandomStream &s) { return sample_gamma({3.5, 2.0}, s); },
               [](double x) { return testsupport::gamma_cdf(x, 3.5, 2.0); }, 15) < crit);
}

TEST_CASE("samplers replay identically under the same stream") {
    RandomStream a(5, 5), b(5, 5);
    for (int k = 0; k < 100; ++k)
        REQUIRE(sample_gamma({0.19, 0.072}, a) == sample_gamma({0.19, 0.072}, b));
}
