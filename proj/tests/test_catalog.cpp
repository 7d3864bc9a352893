#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ruin/catalog.hpp"
#include "ruin/errors.hpp"
#include "ruin/ruin_analytics.hpp"

#include <cmath>
#include <set>

using namespace ruin;

TEST_CASE("the catalog lists eight presets in order") {
    const auto& all = preset_catalog();
    REQUIRE(all.size() == 8);
    std::set<std::string> names;
    for (std::size_t i = 0; i < all.size(); ++i) {
        CHECK(all[i].id == static_cast<int>(i) + 1);
        names.insert(all[i].name);
    }
    CHECK(names.size() == 8);
    CHECK(preset_info("common-shock").params.front().defaults.size() == 7);
    CHECK_THROWS_AS(preset_info("bogus"), UnknownPreset);
    CHECK_THROWS_AS(make_preset("bogus"), UnknownPreset);
}

TEST_CASE("every preset constructs a valid model") {
    for (const auto& info : preset_catalog()) {
        CAPTURE(info.name);
        const auto p = make_preset(info.name);
        CHECK(p.claim_slots == info.dim);
        p.arrivals.validate();
        for (const auto& g : p.groups) CHECK(g.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
        const auto spec = preset_spec(info.name);
        CHECK_NOTHROW(spec.validate());
        CHECK(safety_loading(reduce_law(spec), spec.premium_rate).rho == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("poisson order k is uniform") {
    const auto p = make_preset("poisson-order-k", {{"k", {4}}});
    const auto& g = p.groups.at(0);
    REQUIRE(g.atoms().size() == 4);
    for (int i = 1; i <= 4; ++i) CHECK(g.pmf({i}) == doctest::Approx(0.25));
}

TEST_CASE("polya-aeppli of order k follows the truncated geometric law") {
    const auto p = make_preset("polya-aeppli-order-k", {{"p", {0.5}}, {"k", {2}}});
    const auto& g = p.groups.at(0);
    CHECK(g.pmf({1}) == doctest::Approx(2.0 / 3.0));
    CHECK(g.pmf({2}) == doctest::Approx(1.0 / 3.0));
    CHECK(g.mean(0) == doctest::Approx(4.0 / 3.0));

    for (double prob : {0.1, 0.35, 0.8}) {
        for (int k : {1, 3, 7}) {
            const auto q = make_preset("polya-aeppli-order-k", {{"p", {prob}}, {"k", {double(k)}}});
            const double tail = std::pow(1 - prob, k);
            CHECK(q.groups[0].mean(0) == doctest::Approx((1 - tail * (1 + k * prob)) / (prob * (1 - tail))).epsilon(1e-12));
            for (double z : {0.2, 0.9}) {
                const double zz[] = {z};
                const double closed = z * prob / (1 - tail) * (1 - std::pow((1 - prob) * z, k)) / (1 - z * (1 - prob));
                CHECK(q.groups[0].pgf(zz) == doctest::Approx(closed).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("common shock with unit intensities") {
    const auto p = make_preset("common-shock");
    CHECK(p.arrivals.total() == doctest::Approx(7.0));
    const auto& g = p.groups.at(0);
    REQUIRE(g.atoms().size() == 7);
    for (const auto& a : g.atoms()) CHECK(a.prob == doctest::Approx(1.0 / 7.0));
    CHECK(g.p0() == 0.0);
}

TEST_CASE("common shock marginal claim intensities") {
    // order l11 l22 l33 l12 l13 l23 l123
    const std::vector<double> r = {0.5, 1.0, 1.5, 0.25, 0.75, 2.0, 0.3};
    const auto p = make_preset("common-shock", {{"rates", r}});
    const double l0 = p.arrivals.total();
    const auto& g = p.groups.at(0);
    CHECK(l0 * g.mean(0) == doctest::Approx(r[0] + r[3] + r[4] + r[6]));
    CHECK(l0 * g.mean(1) == doctest::Approx(r[1] + r[3] + r[5] + r[6]));
    CHECK(l0 * g.mean(2) == doctest::Approx(r[2] + r[4] + r[5] + r[6]));
}

TEST_CASE("negative multinomial and negative binomial presets") {
    const auto nm = make_preset("neg-multinomial");
    CHECK(nm.groups.at(0).p0() == doctest::Approx(0.49));
    const auto inb = make_preset("independent-neg-binomial");
    CHECK(inb.arrivals.mode == ArrivalSpec::Mode::independent_streams);
    REQUIRE(inb.groups.size() == 2);
    CHECK(inb.groups[0].p0() == doctest::Approx(0.6));
    CHECK(inb.groups[1].p0() == doctest::Approx(0.49));
    const auto pa = make_preset("polya-aeppli");
    CHECK(pa.groups[0].p0() == 0.0);
    CHECK(pa.groups[1].mean(0) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("wang lines and compound compound") {
    const auto w = make_preset("wang-lines");
    CHECK(w.groups.at(0).p0() == doctest::Approx(0.3));
    CHECK(w.groups.at(0).pmf({1, 1}) == doctest::Approx(0.2));
    const auto cc = make_preset("compound-compound");
    CHECK(cc.groups.at(0).p0() == doctest::Approx(0.2));
    CHECK(condition_nonempty(cc.groups.at(0)).mean(0) == doctest::Approx(1.375));
}

TEST_CASE("invalid preset parameters") {
    CHECK_THROWS_AS(make_preset("polya-aeppli-order-k", {{"p", {1.5}}}), InvalidParams);
    CHECK_THROWS_AS(make_preset("poisson-order-k", {{"k", {2.5}}}), InvalidParams);
    CHECK_THROWS_AS(make_preset("neg-multinomial", {{"p", {0.6, 0.5}}}), InvalidParams);
    CHECK_THROWS_AS(make_preset("common-shock", {{"rates", {1, 2}}}), InvalidParams);
    CHECK_THROWS_AS(make_preset("wang-lines", {{"colour", {1}}}), InvalidParams);
    CHECK_THROWS_AS(preset_spec("wang-lines", {}, std::vector<ClaimDistribution>{ClaimDistribution::exponential(1)}),
                    InvalidParams);
}

TEST_CASE("preset_spec respects explicit claims and premium") {
    const auto spec = preset_spec("poisson-order-k", {{"k", {1}}}, std::vector{ClaimDistribution::exponential(2.0)}, 1.5, 3.0);
    CHECK(spec.premium_rate == 1.5);
    CHECK(spec.initial_capital == 3.0);
    const auto law = reduce_law(spec);
    CHECK(law.y1_mean == doctest::Approx(0.5));
}
