// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "ruin/catalog.hpp"
#include "ruin/cli/commands.hpp"
#include "ruin/errors.hpp"
#include "ruin/group_models.hpp"
#include "ruin/ruin_analytics.hpp"
#include "ruin/simulation.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ruin;
using Rational = boost::multiprecision::cpp_rational;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

class Detail {
public:
    template <class... T>
    Detail& add(const char* fmt, T... args) {
        char buf[256];
        std::snprintf(buf, sizeof buf, fmt, args...);
        if (!text_.empty()) text_ += "; ";
        text_ += buf;
        return *this;
    }
    const std::string& str() const { return text_; }

private:
    std::string text_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RiskModelSpec exponential_model() {
    return RiskModelSpec{ArrivalSpec::single(1.0), {GroupSizeModel::point_mass({1})},
                         {ClaimDistribution::exponential(1.0)}, 2.0, 0.0};
}

// d = 1, every group holds two Exponential(1) claims
RiskModelSpec pair_model() {
    return RiskModelSpec{ArrivalSpec::single(1.0), {GroupSizeModel::point_mass({2})},
                         {ClaimDistribution::exponential(1.0)}, 3.0, 0.0};
}

double pair_psi(double u) {
    const double r = std::sqrt(13.0);
    return 2.0 * (4.0 * r * std::sinh(r * u / 6.0) + 13.0 * std::cosh(r * u / 6.0)) * std::exp(-5.0 * u / 6.0) / 39.0;
}

SimulationConfig sim_config(std::uint64_t reps, std::uint64_t seed = SimulationConfig{}.seed) {
    SimulationConfig cfg;
    cfg.replications = reps;
    cfg.seed = seed;
    return cfg;
}

std::vector<double> unit_grid(double step, double upper) {
    std::vector<double> u;
    const auto n = static_cast<std::size_t>(std::llround(upper / step));
    for (std::size_t k = 0; k <= n; ++k) u.push_back(step * static_cast<double>(k));
    return u;
}

Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = reduce(exponential_model(), {0.01, 0});
    const auto report = analyze(m, 2.0);
    const auto grid = unit_grid(0.01, 10.0);
    const auto psi = psi_pollaczek_khinchin(m, 2.0, grid);
    const double elapsed = seconds_since(t0);

    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) worst = std::max(worst, std::abs(psi[k] - 0.5 * std::exp(-0.5 * grid[k])));
    const double eps = report.lundberg_epsilon ? report.lundberg_epsilon->value : NAN;
    const bool pass = std::abs(report.rho.value - 1.0) <= 1e-10 && std::abs(report.psi0.value - 0.5) <= 1e-10 &&
                      std::abs(eps - 0.5) <= 1e-10 && worst <= 1e-3 && elapsed < 10.0;
    Detail d;
    d.add("rho=%.12g psi0=%.12g eps=%.12g", report.rho.value, report.psi0.value, eps)
        .add("max|psi_PK - psi0 e^{-eps u}| on [0,10] = %.2e (tol 1e-3)", worst)
        .add("%.2f s (limit 10 s)", elapsed);
    return {pass, d.str()};
}

Outcome criterion2() {
    Detail d;
    bool pass = true;
    const auto check = [&](const char* name, const RiskModelSpec& spec, const std::function<double(double)>& exact) {
        const auto m = reduce(spec, {0.01, 0});
        const double c = spec.premium_rate;
        const auto grid = unit_grid(0.01, 10.0);
        const auto pk = psi_pollaczek_khinchin(m, c, grid);
        const auto delta = delta_renewal_solve(m, c, grid);
        double cf_pk = 0.0, cf_ren = 0.0, pk_ren = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double cf = exact(grid[k]);
            const double ren = 1.0 - delta[k];
            cf_pk = std::max(cf_pk, std::abs(cf - pk[k]));
            cf_ren = std::max(cf_ren, std::abs(cf - ren));
            pk_ren = std::max(pk_ren, std::abs(pk[k] - ren));  // |delta + psi_PK - 1|
        }
        pass = pass && cf_pk <= 3e-3 && cf_ren <= 3e-3 && pk_ren <= 3e-3;
        d.add("%s: closed/PK %.1e, closed/renewal %.1e, |delta+psi-1| %.1e", name, cf_pk, cf_ren, pk_ren);
    };
    check("exponential", exponential_model(), [](double u) { return exponential_closed_form(1.0, 1.0, 2.0, u).psi; });
    check("U=2 group", pair_model(), pair_psi);
    d.add("tol 3e-3");
    return {pass, d.str()};
}

Outcome criterion3() {
    const auto t0 = std::chrono::steady_clock::now();
    Detail d;
    bool pass = true;
    const double u[] = {0.0, 1.0, 5.0};
    for (const auto& [name, spec] : {std::pair{"exponential", exponential_model()}, std::pair{"U=2 group", pair_model()}}) {
        const auto m = reduce(spec, {0.01, 0});
        const auto est = estimate_psi_ladder(m, spec.premium_rate, u, sim_config(1'000'000));
        const auto pk = psi_pollaczek_khinchin(m, spec.premium_rate, u);
        for (int i = 0; i < 3; ++i) {
            const double z = (est[i].estimate - pk[i]) / est[i].standard_error;
            pass = pass && std::abs(z) <= 3.0;
            d.add("%s u=%g: %.5f vs %.5f (z=%+.2f)", name, u[i], est[i].estimate, pk[i], z);
        }
    }
    const double elapsed = seconds_since(t0);
    pass = pass && elapsed < 60.0;
    d.add("10^6 reps, %.1f s (limit 60 s)", elapsed);
    return {pass, d.str()};
}

Outcome criterion4() {
    Detail d;
    bool pass = true;
    const auto compare = [&](const char* name, const RiskModelSpec& spec, double u, double target) {
        const auto est = estimate_ruin_time(spec, sim_config(1'000'000), u);
        const double z = (est.mean.estimate - target) / est.mean.standard_error;
        pass = pass && std::abs(z) <= 3.0;
        d.add("%s u=%g: %.4f vs %.4f (z=%+.2f, %llu ruined)", name, u, est.mean.estimate, target, z,
              static_cast<unsigned long long>(est.ruined));
    };
    const auto exp_law = reduce_law(exponential_model());
    const auto pair_law = reduce_law(pair_model());
    compare("exponential", exponential_model(), 0.0, expected_ruin_time_zero(exp_law, 2.0));
    compare("U=2 group", pair_model(), 0.0, expected_ruin_time_zero(pair_law, 3.0));
    for (double u : {0.0, 1.0})
        compare("exponential, closed form in u", exponential_model(), u,
                exponential_closed_form(1.0, 1.0, 2.0, u).expected_ruin_time);
    return {pass, d.str()};
}

Outcome criterion5() {
    Detail d;
    bool pass = true;
    const double u[] = {0.0, 1.0, 5.0};
    const auto compare = [&](const char* name, const RiskModelSpec& a, const RiskModelSpec& b, bool keep_empty) {
        LatticeOptions lhs_opts;
        lhs_opts.thin = !keep_empty;
        const auto shape = default_lattice(reduce_law(b));
        lhs_opts.step = shape.step;
        lhs_opts.points = shape.points;
        LatticeOptions rhs_opts = lhs_opts;
        rhs_opts.thin = true;
        const auto ma = reduce(a, lhs_opts);
        const auto mb = reduce(b, rhs_opts);
        const double la = ma.lambda * ma.y1_mean, lb = mb.lambda * mb.y1_mean;
        double sup = 0.0;
        for (std::size_t k = 0; k < std::min(ma.fi_grid.size(), mb.fi_grid.size()); ++k)
            sup = std::max(sup, std::abs(ma.fi_grid.values()[k] - mb.fi_grid.values()[k]));
        const bool same_lattice = ma.fi_grid.size() == mb.fi_grid.size() && ma.step() == mb.step();
        const bool lam_ok = std::abs(la - lb) <= 1e-12 * std::max(la, lb);
        pass = pass && lam_ok && same_lattice && sup < kLatticeTolerance;
        d.add("%s: lambda E Y1 %.15g vs %.15g, fi sup %.1e (tol %.0e)", name, la, lb, sup, kLatticeTolerance);
        // independent seeds on the two sides
        const auto ea = estimate_psi_ladder(ma, a.premium_rate, u, sim_config(1'000'000, 101));
        const auto eb = estimate_psi_ladder(mb, b.premium_rate, u, sim_config(1'000'000, 202));
        for (int i = 0; i < 3; ++i) {
            const double pooled = std::hypot(ea[i].standard_error, eb[i].standard_error);
            const double z = (ea[i].estimate - eb[i].estimate) / pooled;
            pass = pass && std::abs(z) <= 3.0;
            d.add("u=%g ladder %.5f vs %.5f (z=%+.2f)", u[i], ea[i].estimate, eb[i].estimate, z);
        }
    };
    const auto lines = preset_spec("wang-lines");
    const double p0 = reduce_law(lines).p0;
    d.add("d=%zu model with p0=%.3f", lines.dim(), p0);
    pass = pass && lines.dim() == 2 && std::abs(p0 - 0.3) < 1e-12;
    compare("empty-inclusive vs thinned", lines, thinned_spec(lines), true);
    const auto streams = preset_spec("independent-neg-binomial");
    compare("independent streams vs merged", streams, merged_spec(streams), false);
    return {pass, d.str()};
}

Rational power(const Rational& z, int n) {
    Rational out(1);
    for (int i = 0; i < n; ++i) out *= z;
    return out;
}

Outcome criterion6() {
    std::mt19937 gen(20240611);
    std::uniform_int_distribution<int> weight(0, 9);
    std::size_t checks = 0, failures = 0;
    for (int trial = 0; trial < 5; ++trial) {
        const int d = 1 + trial % 3;
        std::vector<BasicCountAtom<Rational>> law;
        std::vector<std::pair<std::vector<int>, int>> raw;
        int total = 0;
        const int cells = static_cast<int>(std::pow(3, d));
        for (int code = 0; code < cells; ++code) {
            std::vector<int> counts(d);
            for (int s = 0, c = code; s < d; ++s, c /= 3) counts[s] = c % 3;
            const int w = code == 0 ? 1 + weight(gen) : weight(gen);
            if (w == 0) continue;
            raw.push_back({counts, w});
            total += w;
        }
        for (auto& [counts, w] : raw) law.push_back({counts, Rational(w, total)});

        const Rational p0 = empty_mass(law);
        const auto cond = condition_atoms(law);
        const auto expect = [&](bool ok) {
            ++checks;
            failures += !ok;
        };
        Rational mass(0);
        for (const auto& a : cond) mass += a.prob;
        expect(mass == 1);
        for (int s = 0; s < d; ++s) {
            const Rational m = marginal_mean(law, s), v = marginal_variance(law, s);
            expect(marginal_mean(cond, s) == m / (1 - p0));
            expect(marginal_variance(cond, s) == v / (1 - p0) - p0 * m * m / ((1 - p0) * (1 - p0)));
            for (const Rational z : {Rational(0), Rational(1, 2), Rational(5, 3)}) {
                Rational g(0), gc(0);
                for (const auto& a : law) g += a.prob * power(z, a.counts[s]);
                for (const auto& a : cond) gc += a.prob * power(z, a.counts[s]);
                expect(gc == (g - p0) / (1 - p0));
            }
            for (int t = s + 1; t < d; ++t) {
                Rational e(0), ec(0);
                for (const auto& a : law) e += a.prob * a.counts[s] * a.counts[t];
                for (const auto& a : cond) ec += a.prob * a.counts[s] * a.counts[t];
                const Rational mt = marginal_mean(law, t);
                const Rational cov = e - m * mt;
                const Rational cov_c = ec - marginal_mean(cond, s) * marginal_mean(cond, t);
                expect(cov_c == cov / (1 - p0) - p0 * m * mt / ((1 - p0) * (1 - p0)));
            }
        }
    }
    Detail d;
    d.add("5 random laws on {0,1,2}^d, d=1..3: %zu exact identities checked, %zu mismatches", checks, failures);
    return {failures == 0, d.str()};
}

Outcome criterion7() {
    std::vector<std::pair<std::string, RiskModelSpec>> models = {{"exponential", exponential_model()},
                                                                  {"U=2 group", pair_model()}};
    for (const auto& info : preset_catalog()) models.push_back({info.name, preset_spec(info.name)});
    std::size_t points = 0, violations = 0;
    Detail d;
    for (const auto& [name, spec] : models) {
        const auto m = reduce(spec);
        const auto report = analyze(m, spec.premium_rate);
        if (!report.lundberg_epsilon) {
            d.add("%s: no Lundberg exponent", name.c_str());
            ++violations;
            continue;
        }
        const double eps = report.lundberg_epsilon->value;
        for (std::size_t k = 0; k < report.psi.values.size(); ++k) {
            ++points;
            if (!(report.psi.values[k] <= std::exp(-eps * report.psi.step * static_cast<double>(k)))) ++violations;
        }
    }
    d.add("%zu models, %zu lattice points, %zu violations of psi_PK(u) <= exp(-eps u)", models.size(), points,
          violations);
    return {violations == 0, d.str()};
}

Outcome criterion8() {
    const auto spec = exponential_model();
    const auto m = reduce(spec, {0.01, 0});
    const auto sample = empirical_deficit(spec, m.fi_grid, sim_config(220'000));
    const auto n = sample.deficit.size();
    const double target = m.y1_second_moment / m.y1_mean;
    const double z = (sample.ruin_claim_mean.estimate - target) / sample.ruin_claim_mean.standard_error;
    const bool pass = n >= 100'000 && sample.ks_distance < sample.ks_critical_1pct && std::abs(z) <= 3.0;
    Detail d;
    d.add("%zu ruined paths", n)
        .add("KS %.5f vs 1%% critical %.5f", sample.ks_distance, sample.ks_critical_1pct)
        .add("claim causing ruin mean %.4f vs E Y^2/E Y = %.4f (z=%+.2f)", sample.ruin_claim_mean.estimate, target, z);
    return {pass, d.str()};
}

Outcome criterion9() {
    const auto claim = ClaimDistribution::pareto(3.0, 1.0);
    const RiskModelSpec spec{ArrivalSpec::single(1.0), {GroupSizeModel::point_mass({1})}, {claim}, 2.0 * claim.mean(), 0.0};
    const auto m = reduce(spec);
    const auto r = heavy_tail_asymptotic(m, spec.premium_rate);
    Detail d;
    if (r.u.empty()) return {false, "no reliable lattice points"};
    const double last = r.ratio.back();
    const double rel = std::abs(last - r.limit) / r.limit;
    // over the last decade of u the distance to the limit must shrink monotonically
    bool monotone = true;
    std::size_t in_decade = 0;
    double prev = INFINITY;
    for (std::size_t i = 0; i < r.u.size(); ++i) {
        if (r.u[i] < r.u.back() / 10.0) continue;
        ++in_decade;
        const double gap = std::abs(r.ratio[i] - r.limit);
        if (gap > prev) monotone = false;
        prev = gap;
    }
    const bool pass = r.applicable && rel <= 0.15 && monotone && in_decade >= 3;
    d.add("Pareto(3), rho=1: reliable u = %.1f, ratio there %.5f vs 1/rho = %.3f (%.2f%%, limit 15%%)", r.reliable_u,
          last, r.limit, 100 * rel)
        .add("%s over the last decade (%zu points)", monotone ? "monotone" : "NOT monotone", in_decade);
    return {pass, d.str()};
}

Outcome criterion10() {
    Detail d;
    bool pass = true;
    const auto check = [&](const char* name, const RiskModelSpec& spec, const std::function<double(double)>& g0) {
        const auto m = reduce(spec, {0.01, 0});
        const double c = spec.premium_rate;
        const auto y = unit_grid(0.05, 10.0);
        const double u0[] = {0.0};
        const auto at0 = gerber_shiu_solve(m, c, u0, y);
        double worst0 = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) worst0 = std::max(worst0, std::abs(at0.g[0][j] - g0(y[j])));

        const double y_max[] = {50.0 * m.y1_mean};
        const double us[] = {0.0, 1.0, 2.0, 5.0, 10.0};
        const auto far = gerber_shiu_solve(m, c, us, y_max);
        const auto pk = psi_pollaczek_khinchin(m, c, us);
        double worst = 0.0;
        for (int i = 0; i < 5; ++i) worst = std::max(worst, std::abs(far.g[i][0] - pk[i]));
        pass = pass && worst0 <= 1e-3 && worst < 5e-3;
        d.add("%s: max|G(0,y) - exact| on [0,10] %.1e (tol 1e-3), max|G(u,50 E Y) - psi_PK(u)| %.1e (tol 5e-3)", name,
              worst0, worst);
    };
    check("exponential", exponential_model(), [](double y) { return 0.5 * (1.0 - std::exp(-y)); });
    // (lambda / c) int_0^y (1 + x) e^{-x} dx for Erlang(2, 1) groups
    check("U=2 group", pair_model(), [](double y) { return (2.0 - (2.0 + y) * std::exp(-y)) / 3.0; });
    return {pass, d.str()};
}

Outcome criterion11() {
    const auto dir = std::filesystem::temp_directory_path() / "ruin_acceptance_presets";
    std::size_t ok = 0;
    Detail d;
    bool pass = preset_catalog().size() == 8;
    for (const auto& info : preset_catalog()) {
        const auto preset = make_preset(info.name);
        bool good = true;
        for (const auto& g : preset.groups) good = good && std::abs(g.total_mass() - 1.0) < 1e-12;
        std::ostringstream out, err;
        const int code = cli::run_cli({"analyze", "--preset", info.name, "--out", (dir / info.name).string()}, out, err);
        good = good && code == 0;
        if (!good) d.add("%s failed (exit %d)", info.name.c_str(), code);
        ok += good;
    }
    std::filesystem::remove_all(dir);
    const auto shock_preset = make_preset("common-shock");
    const auto& shock = shock_preset.groups.at(0);
    bool sevenths = shock.atoms().size() == 7;
    for (const auto& a : shock.atoms()) sevenths = sevenths && std::abs(a.prob - 1.0 / 7.0) < 1e-15;
    pass = pass && ok == 8 && sevenths;
    d.add("%zu/8 presets construct, sum to 1 and analyze", ok)
        .add("common-shock atoms: %zu, all 1/7: %s", shock.atoms().size(), sevenths ? "yes" : "no");
    return {pass, d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
        {"exponential closed forms", criterion1},  {"cross-method consistency", criterion2},
        {"Monte Carlo ladder validation", criterion3}, {"ruin time formulas", criterion4},
        {"thinning and merging equivalence", criterion5}, {"conditioning identities (exact)", criterion6},
        {"Lundberg bound", criterion7},             {"deficit laws", criterion8},
        {"heavy-tail asymptotic", criterion9},      {"Gerber-Shiu function", criterion10},
        {"preset catalog", criterion11},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
