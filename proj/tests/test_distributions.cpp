#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ruin/distributions.hpp"
#include "ruin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace ruin;

namespace {

std::vector<ClaimDistribution> all_families() {
    return {ClaimDistribution::exponential(1.5), ClaimDistribution::erlang(3, 2.0),
            ClaimDistribution::pareto(3.0, 1.0), ClaimDistribution::lognormal(0.0, 0.5),
            ClaimDistribution::weibull(1.5, 1.0), ClaimDistribution::weibull(0.7, 1.0),
            ClaimDistribution::uniform(0.5, 2.0)};
}

}  // namespace

TEST_CASE("cdf examples") {
    const auto e = ClaimDistribution::exponential(1.0);
    CHECK(e.cdf(0.0) == 0.0);
    CHECK(e.cdf(-3.0) == 0.0);
    CHECK(e.cdf(60.0) == doctest::Approx(1.0));
    CHECK(ClaimDistribution::erlang(2, 1.0).cdf(1.0) == doctest::Approx(0.26424111765711533).epsilon(1e-13));
}

TEST_CASE("cdf invariants hold on a grid for every family") {
    for (const auto& d : all_families()) {
        CAPTURE(d.describe());
        CHECK(d.cdf(0.0) == 0.0);
        double prev = 0.0;
        for (double x = 0.0; x < 50.0; x += 0.05) {
            const double f = d.cdf(x);
            CHECK(f >= prev - 1e-15);
            CHECK(f <= 1.0);
            prev = f;
        }
        CHECK(d.cdf(1e6) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(d.mean() > 0.0);
        if (std::isfinite(d.variance())) CHECK(d.variance() >= 0.0);
    }
}

TEST_CASE("quantile inverts the cdf") {
    for (const auto& d : all_families()) {
        CAPTURE(d.describe());
        for (double p : {0.01, 0.3, 0.5, 0.9, 0.999}) CHECK(d.cdf(d.quantile(p)) == doctest::Approx(p).epsilon(1e-9));
    }
}

TEST_CASE("transform examples and invariants") {
    CHECK(ClaimDistribution::exponential(2.0).lst(1.0) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(ClaimDistribution::pareto(2.0, 1.0).lst(-0.1), DivergentTransform);
    CHECK_THROWS_AS(ClaimDistribution::exponential(1.0).lst(-1.5), DivergentTransform);
    CHECK(ClaimDistribution::exponential(1.0).lst(-0.5) == doctest::Approx(2.0));
    for (const auto& d : all_families()) {
        CAPTURE(d.describe());
        CHECK(d.lst(0.0) == 1.0);
        double prev = 1.0;
        for (double s = 0.1; s < 5.0; s += 0.3) {
            const double l = d.lst(s);
            CHECK(l > 0.0);
            CHECK(l <= prev + 1e-12);
            prev = l;
        }
    }
}

TEST_CASE("quadrature transforms match closed forms") {
    // uniform(a, b): (e^{-sa} - e^{-sb}) / (s (b - a))
    const auto u = ClaimDistribution::uniform(0.5, 2.0);
    for (double s : {0.3, 1.0, 4.0})
        CHECK(u.lst(s) == doctest::Approx((std::exp(-0.5 * s) - std::exp(-2.0 * s)) / (1.5 * s)).epsilon(1e-10));
    // Weibull with shape 1 is exponential
    const auto w = ClaimDistribution::weibull(1.0, 2.0);
    CHECK(w.lst(0.7) == doctest::Approx(1.0 / (1.0 + 1.4)).epsilon(1e-10));
    CHECK(w.lst(-0.2) == doctest::Approx(1.0 / (1.0 - 0.4)).epsilon(1e-9));
    CHECK(ClaimDistribution::lognormal(0.0, 1.0).lst_abscissa() == 0.0);
}

TEST_CASE("closed second moments") {
    CHECK(ClaimDistribution::erlang(2, 1.0).second_moment() == doctest::Approx(6.0));
    CHECK(ClaimDistribution::pareto(3.0, 1.0).second_moment() == doctest::Approx(3.0));
    CHECK(std::isinf(ClaimDistribution::pareto(2.0, 1.0).second_moment()));
    CHECK(std::isinf(ClaimDistribution::pareto(1.0, 1.0).mean()));
    CHECK(ClaimDistribution::uniform(0.0, 3.0).second_moment() == doctest::Approx(3.0));
    CHECK(ClaimDistribution::lognormal(0.0, 0.5).mean() == doctest::Approx(std::exp(0.125)));
    CHECK(ClaimDistribution::pareto(2.0, 1.0).heavy_tailed());
    CHECK_FALSE(ClaimDistribution::weibull(1.5, 1.0).heavy_tailed());
    CHECK(ClaimDistribution::weibull(0.5, 1.0).heavy_tailed());
}

TEST_CASE("convolution powers") {
    const auto e = ClaimDistribution::exponential(1.0);
    const auto zero = convolve_power(e, 0, 0.01, 500);
    for (double v : zero.values()) CHECK(v == 1.0);

    const auto two = convolve_power(e, 2, 0.01, 3000);
    CHECK(two.cdf(1.0) == doctest::Approx(0.26424111765711533).epsilon(1e-4));

    const auto one = convolve_power(e, 1, 0.01, 3000);
    for (double x : {0.0, 0.5, 1.0, 3.0, 10.0}) CHECK(std::abs(one.cdf(x) - e.cdf(x)) < 1e-4);

    CHECK_THROWS_AS(convolve_power(e, 5, 0.01, 300), GridTooCoarse);
}

TEST_CASE("convolution powers conserve the mean and factor the transform") {
    for (const auto& d : {ClaimDistribution::exponential(1.0), ClaimDistribution::erlang(2, 3.0),
                          ClaimDistribution::uniform(0.0, 2.0), ClaimDistribution::weibull(2.0, 1.0)}) {
        CAPTURE(d.describe());
        const double h = 0.01 * d.mean();
        const auto points = static_cast<std::size_t>(std::ceil((4 * d.mean() + 60 * std::sqrt(d.variance())) / h));
        for (int n : {1, 2, 3}) {
            const auto g = convolve_power(d, n, h, points);
            CHECK(g.mean() == doctest::Approx(n * d.mean()).epsilon(1e-3));
        }
        const auto sq = convolve_power(d, 2, h, points);
        for (double s : {0.1, 0.5, 1.0, 2.0}) {
            const double s_scaled = s / d.mean();
            CHECK(sq.lst(s_scaled) == doctest::Approx(std::pow(d.lst(s_scaled), 2)).epsilon(1e-3));
        }
    }
}

TEST_CASE("integrated tail examples") {
    const auto e = integrated_tail(ClaimDistribution::exponential(2.0), 0.005, 3000);
    for (double x : {0.1, 1.0, 3.0}) CHECK(e.cdf(x) == doctest::Approx(1.0 - std::exp(-2.0 * x)).epsilon(1e-5));

    const double b = 2.0;
    const auto u = integrated_tail(ClaimDistribution::uniform(0.0, b), 0.01, 300);
    for (double x : {0.1, 0.5, 1.0, 1.5, 2.0}) CHECK(u.cdf(x) == doctest::Approx(x * (2 * b - x) / (b * b)).epsilon(1e-5));

    const auto p = integrated_tail(ClaimDistribution::pareto(2.0, 1.0), 0.01, 1000);
    CHECK(p.cdf(1.0) == doctest::Approx(0.5).epsilon(1e-6));

    CHECK_THROWS_AS(integrated_tail(ClaimDistribution::pareto(1.0, 1.0), 0.01, 100), InfiniteMean);
}

TEST_CASE("integrated tail has mean EY^2 / (2 EY)") {
    for (const auto& d : {ClaimDistribution::exponential(1.0), ClaimDistribution::erlang(3, 2.0),
                          ClaimDistribution::uniform(0.5, 2.0), ClaimDistribution::weibull(1.5, 1.0),
                          ClaimDistribution::lognormal(0.0, 0.4)}) {
        CAPTURE(d.describe());
        const auto shape = default_lattice(d.mean(), d.variance());
        const auto fi = integrated_tail(d, shape.step, shape.points);
        fi.validate(1e-6);
        CHECK(fi.mean() == doctest::Approx(d.second_moment() / (2 * d.mean())).epsilon(1e-3));
    }
}

TEST_CASE("default lattice covers mean plus forty standard deviations") {
    const auto s = default_lattice(2.0, 4.0);
    CHECK(s.step == doctest::Approx(0.02));
    CHECK(s.step * (s.points - 1) >= 2.0 + 40 * 2.0 - 1e-9);
    const auto heavy = default_lattice(1.5, std::numeric_limits<double>::infinity());
    CHECK(heavy.points >= 2);
}

TEST_CASE("sampling is reproducible and unbiased") {
    const auto e = ClaimDistribution::exponential(1.0);
    CounterRng a(5, 11), b(5, 11);
    for (int i = 0; i < 10; ++i) CHECK(e.sample(a) == e.sample(b));

    const int n = 1'000'000;
    CounterRng rng(20170823, 0);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += e.sample(rng);
    CHECK(std::abs(sum / n - 1.0) < 4.0 / std::sqrt(n));

    const auto u = ClaimDistribution::uniform(0.0, 2.0);
    std::vector<double> xs(n);
    for (auto& x : xs) x = u.sample(rng);
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = u.cdf(xs[i]);
        ks = std::max({ks, std::abs(f - double(i) / n), std::abs(f - double(i + 1) / n)});
    }
    CHECK(ks < 1.95 / std::sqrt(n));  // KS critical value at the 0.001 level
}

TEST_CASE("erlang and empirical sampling") {
    const auto d = ClaimDistribution::erlang(2, 1.0);
    CounterRng rng(3, 0);
    const int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += d.sample(rng);
    CHECK(std::abs(sum / n - 2.0) < 4.0 * std::sqrt(2.0 / n));

    const auto grid = convolve_power(ClaimDistribution::exponential(1.0), 1, 0.01, 4000);
    const auto emp = ClaimDistribution::empirical(grid);
    CHECK(emp.mean() == doctest::Approx(1.0).epsilon(1e-3));
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) s2 += emp.sample(rng);
    CHECK(std::abs(s2 / n - 1.0) < 4.0 / std::sqrt(n) + 1e-3);
    CHECK(emp.lst(1.0) == doctest::Approx(0.5).epsilon(1e-3));
}
