#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ruin/errors.hpp"
#include "ruin/lattice.hpp"

#include <cmath>
#include <numeric>

using namespace ruin;

namespace {

LatticeMasses exponential_masses(double rate, double step, std::size_t points) {
    return discretize_cdf([rate](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-rate * x); }, step, points);
}

}  // namespace

TEST_CASE("gridded distribution reads a cdf by linear interpolation") {
    const GriddedDistribution g(0.5, {0.0, 0.5, 1.0}, 0.0);
    CHECK(g.cdf(-1.0) == 0.0);
    CHECK(g.cdf(0.25) == doctest::Approx(0.25));
    CHECK(g.cdf(0.75) == doctest::Approx(0.75));
    CHECK(g.cdf(5.0) == 1.0);
    CHECK(g.upper() == 1.0);
    CHECK(g.quantile(0.25) == doctest::Approx(0.25));
    CHECK(g.quantile(1.0) == doctest::Approx(1.0));
    CHECK(g.mean() == doctest::Approx(0.5));

    std::vector<double> fine(1001);
    for (std::size_t k = 0; k < fine.size(); ++k) fine[k] = k / 1000.0;
    CHECK(GriddedDistribution(0.001, fine, 0.0).second_moment() == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
}

TEST_CASE("gridded distribution rejects broken invariants") {
    CHECK_THROWS_AS(GriddedDistribution(0.1, {0.0, 0.6, 0.5}, 0.5).validate(), InvalidParams);
    CHECK_THROWS_AS(GriddedDistribution(0.1, {0.0, 0.5}, 0.2).validate(), InvalidParams);
    CHECK_THROWS(GriddedDistribution(-0.1, {0.0, 1.0}, 0.0));
    CHECK_NOTHROW(GriddedDistribution::from_values(0.1, {0.0, 0.5, 0.9}).validate());
}

TEST_CASE("unit mass is the step at zero") {
    const auto g = to_gridded(unit_mass(0.1, 11), 11);
    for (double v : g.values()) CHECK(v == 1.0);
    CHECK(g.tail_mass() == 0.0);
}

TEST_CASE("midpoint discretization keeps cell masses on odd slots") {
    const auto m = exponential_masses(1.0, 0.01, 101);
    REQUIRE(m.size() == half_length(101));
    CHECK(m.mass[0] == 0.0);
    CHECK(m.mass[2] == 0.0);
    CHECK(m.mass[1] == doctest::Approx(1.0 - std::exp(-0.01)));
    CHECK(m.total() == doctest::Approx(1.0 - std::exp(-1.0)));
    const auto g = to_gridded(m, 101);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(g.values()[k] == doctest::Approx(1.0 - std::exp(-g.node(k))));
}

TEST_CASE("fft and direct convolution agree") {
    const std::size_t n = 3000;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = std::exp(-0.003 * i) * (1 + (i % 7));
        b[i] = 1.0 / (1.0 + i);
    }
    const auto fast = convolve(a, b, 2500);
    REQUIRE(fast.size() == 2500);
    for (std::size_t k : {0u, 1u, 17u, 999u, 2499u}) {
        double direct = 0.0;
        for (std::size_t i = 0; i <= k; ++i) direct += a[i] * b[k - i];
        CHECK(fast[k] == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("convolution of exponential masses approximates the Erlang(2) cdf") {
    const std::size_t points = 1001;
    const auto m = exponential_masses(1.0, 0.01, points);
    const auto two = to_gridded(convolve(m, m, half_length(points)), points);
    CHECK(two.cdf(1.0) == doctest::Approx(1.0 - 2.0 * std::exp(-1.0)).epsilon(1e-4));
}

TEST_CASE("axpy accumulates weighted masses") {
    LatticeMasses dst{0.1, {}};
    axpy(0.25, unit_mass(0.1, 3), dst);
    axpy(0.5, unit_mass(0.1, 3), dst);
    CHECK(dst.total() == doctest::Approx(0.75));
    CHECK(dst.mass[0] == doctest::Approx(0.75));
}

TEST_CASE("integrated tail of a lattice exponential is exponential") {
    const std::size_t points = 4001;
    const auto g = to_gridded(exponential_masses(2.0, 0.005, points), points);
    const auto fi = integrated_tail_of(g, 0.5);
    for (double x : {0.0, 0.1, 1.0, 5.0}) CHECK(fi.cdf(x) == doctest::Approx(1.0 - std::exp(-2.0 * x)).epsilon(1e-4));
    fi.validate(1e-6);
}

TEST_CASE("lattice transform of an exponential") {
    const std::size_t points = 5001;
    const auto g = to_gridded(exponential_masses(1.0, 0.01, points), points);
    for (double s : {0.1, 0.5, 1.0}) CHECK(g.lst(s) == doctest::Approx(1.0 / (1.0 + s)).epsilon(1e-4));
}
