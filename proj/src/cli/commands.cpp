#include "ruin/cli/commands.hpp"

#include "ruin/catalog.hpp"
#include "ruin/cli/config.hpp"
#include "ruin/cli/report.hpp"
#include "ruin/errors.hpp"
#include "ruin/ruin_analytics.hpp"
#include "ruin/simulation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>

namespace ruin::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ModelSource {
    std::string config;
    std::string preset;
    std::vector<std::string> params;

    void attach(CLI::App* app) {
        app->add_option("config", config, "model config (JSON)");
        app->add_option("--preset", preset, "catalog preset instead of a config file");
        app->add_option("--param", params, "preset parameter key=v1,v2,... (repeatable)");
    }

    ModelConfig load() const {
        if (!config.empty() && !preset.empty()) throw SchemaError("give either a config file or --preset, not both");
        if (!preset.empty()) {
            PresetParams p;
            for (const auto& text : params) parse_preset_param(text, p);
            return preset_config(preset, p);
        }
        if (!params.empty()) throw SchemaError("--param only applies to --preset");
        if (config.empty()) throw SchemaError("no model: give a config file or --preset NAME");
        return load_config(config);
    }
};

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
    return out;
}

LatticeOptions lattice_options(const Numerics& n) { return {n.step, n.points}; }

void check_net_profit(const ReducedLaw& law, double c) {
    const auto loading = safety_loading(law, c);
    if (!loading.net_profit) ruin_at_zero(law, c);
}

int analyze(const ModelSource& src, std::optional<double> step, std::optional<std::size_t> points,
            std::optional<double> tol, const std::string& out_dir, std::ostream& out) {
    auto cfg = src.load();
    if (step) cfg.numerics.step = *step;
    if (points) cfg.numerics.points = *points;
    if (tol) cfg.numerics.tol = *tol;
    const auto& spec = cfg.spec;
    const double c = spec.premium_rate;
    const fs::path dir(out_dir);
    fs::create_directories(dir);

    const auto law = reduce_law(spec);
    const auto loading = safety_loading(law, c);
    if (!loading.net_profit) {
        json doc{{"net_profit", false},
                 {"rho", flagged(loading.rho, Method::closed_form)},
                 {"lambda", flagged(law.lambda, Method::closed_form)},
                 {"y1_mean", flagged(law.y1_mean, Method::closed_form)},
                 {"premium_rate", flagged(c, Method::closed_form)},
                 {"diagnostic", "net profit condition c > lambda E Y1 violated: ruin is certain for every u"},
                 {"model", to_json(cfg)}};
        write_json(dir / "summary.json", doc);
        ruin_at_zero(law, c);  // throws with the full message
    }

    const auto m = reduce(spec, lattice_options(cfg.numerics));
    const auto report = analyze(m, c, cfg.numerics.tol);
    const auto eps = report.lundberg_epsilon ? std::optional<double>(report.lundberg_epsilon->value) : std::nullopt;
    const auto mu = exponential_rate(m);

    // psi, delta and their closed forms
    const double u_top = std::min(m.fi_grid.upper(), std::max(10.0, 20.0 * m.y1_mean));
    const auto u_grid = linspace(0.0, u_top, 201);
    const auto delta = delta_renewal_solve(m, c, u_top);
    CsvTable psi({"u", "psi_pk", "delta_renewal", "one_minus_delta", "psi_closed_form", "lundberg_bound", "cl_approx"});
    for (double u : u_grid) {
        const double d = delta.at(u);
        std::optional<double> closed, bound, approx;
        if (mu) closed = exponential_closed_form(*mu, m.lambda, c, u).psi;
        if (eps) bound = std::exp(-*eps * u);
        if (eps && report.cl_constant) approx = report.cl_constant->value * std::exp(-*eps * u);
        psi.row({cell(u), cell(report.psi.at(u)), cell(d), cell(1.0 - d), cell(closed), cell(bound), cell(approx)});
    }
    psi.write(dir / "psi.csv");

    // Gerber-Shiu slices
    std::vector<double> gs_u;
    for (double k : {0.0, 1.0, 2.0, 5.0, 10.0})
        if (k * m.y1_mean <= u_top) gs_u.push_back(k * m.y1_mean);
    const auto gs_y = linspace(0.0, 50.0 * m.y1_mean, 101);
    const auto gs = gerber_shiu_solve(m, c, gs_u, gs_y);
    CsvTable gtab({"u", "y", "G", "psi_pk"});
    for (std::size_t i = 0; i < gs.u.size(); ++i)
        for (std::size_t j = 0; j < gs.y.size(); ++j)
            gtab.row({cell(gs.u[i]), cell(gs.y[j]), cell(gs.g[i][j]), cell(report.psi.at(gs.u[i]))});
    gtab.write(dir / "gerber_shiu.csv");

    // deficit laws at u = 0
    const auto laws = deficit_laws_at_zero(m);
    CsvTable dtab({"x", "deficit_cdf", "claim_causing_ruin_cdf"});
    for (double x : linspace(0.0, std::min(m.fi_grid.upper(), 10.0 * m.y1_mean), 101))
        dtab.row({cell(x), cell(laws.deficit.cdf(x)), cell(laws.claim_causing_ruin.cdf(x))});
    dtab.write(dir / "deficit.csv");
    CsvTable jtab({"x", "y", "joint_survival"});
    for (double kx : {0.0, 0.5, 1.0, 2.0, 5.0})
        for (double ky : {0.0, 0.5, 1.0, 2.0, 5.0})
            jtab.row({cell(kx * m.y1_mean), cell(ky * m.y1_mean), cell(laws.joint_survival(kx * m.y1_mean, ky * m.y1_mean))});
    jtab.write(dir / "joint.csv");

    // psi / F_I-bar against 1 / rho
    HeavyTailRatio ratio = m.heavy_tailed() ? heavy_tail_asymptotic(m, c)
                                            : heavy_tail_asymptotic(m, c, report.psi, linspace(u_top / 200, u_top, 200));
    CsvTable atab({"u", "ratio", "limit", "applicable"});
    for (std::size_t i = 0; i < ratio.u.size(); ++i) {
        if (!std::isfinite(ratio.ratio[i])) continue;
        atab.row({cell(ratio.u[i]), cell(ratio.ratio[i]), cell(ratio.limit), ratio.applicable ? "true" : "false"});
    }
    atab.write(dir / "asymptotic.csv");

    auto doc = summary_json(m, c, report);
    doc["initial_capital"] = flagged(spec.initial_capital, Method::closed_form);
    if (spec.initial_capital <= m.fi_grid.upper()) {
        doc["psi_at_initial_capital"] = flagged(report.psi.at(spec.initial_capital), Method::lattice);
    }
    doc["claim_causing_ruin_mean"] = flagged(laws.claim_causing_ruin_mean, Method::closed_form);
    doc["heavy_tail"] = {{"applicable", ratio.applicable},
                         {"limit", flagged(ratio.limit, Method::closed_form)},
                         {"reliable_u", flagged(ratio.reliable_u, Method::lattice)}};
    doc["model"] = to_json(cfg);
    write_json(dir / "summary.json", doc);

    out << "rho = " << format_number(report.rho.value) << " (" << to_string(report.rho.method) << ")\n";
    out << "psi(0) = " << format_number(report.psi0.value) << " (" << to_string(report.psi0.method) << ")\n";
    if (eps) {
        out << "epsilon = " << format_number(*eps) << " (" << to_string(report.lundberg_epsilon->method) << ")\n";
    } else {
        out << "epsilon = absent\n";
    }
    if (report.expected_ruin_time_u0) {
        out << "E(tau(0) | ruin) = " << format_number(report.expected_ruin_time_u0->value) << " (closed-form)\n";
    }
    out << "wrote summary.json psi.csv gerber_shiu.csv deficit.csv joint.csv asymptotic.csv to " << dir.string()
        << '\n';
    return kExitOk;
}

struct SimulateFlags {
    std::string method = "both";
    std::optional<std::uint64_t> reps;
    std::optional<std::uint64_t> seed;
    std::optional<double> horizon;
    std::vector<double> u;
    bool check = false;
    std::string out_dir = "ruin-report";
};

int simulate(const ModelSource& src, const SimulateFlags& flags, std::ostream& out, std::ostream& err) {
    auto cfg = src.load();
    if (flags.reps) cfg.simulation.replications = *flags.reps;
    if (flags.seed) cfg.simulation.seed = *flags.seed;
    if (flags.horizon) cfg.simulation.horizon = *flags.horizon;
    cfg.simulation.validate();
    const auto& spec = cfg.spec;
    const double c = spec.premium_rate;
    check_net_profit(reduce_law(spec), c);

    const bool ladder = flags.method != "path";
    const bool path = flags.method != "ladder";
    auto u_list = flags.u.empty() ? std::vector<double>{0.0, 1.0, 5.0} : flags.u;
    std::sort(u_list.begin(), u_list.end());
    u_list.erase(std::unique(u_list.begin(), u_list.end()), u_list.end());

    const auto m = reduce(spec, lattice_options(cfg.numerics));
    const auto psi = psi_pollaczek_khinchin(m, c, cfg.numerics.tol);
    const auto mu = exponential_rate(m);
    const auto n = cfg.simulation.replications;

    std::vector<std::string> failures;
    const auto check = [&](const std::string& what, double analytic, double estimate, double se) {
        if (std::abs(estimate - analytic) > 4.0 * se) failures.push_back(what);
    };
    const auto binomial_se = [&](double p) { return std::sqrt(std::max(p * (1.0 - p), 1.0 / n) / n); };

    std::vector<EstimateWithCI> ladder_est;
    if (ladder) ladder_est = estimate_psi_ladder(m, c, u_list, cfg.simulation);

    CsvTable table({"u", "psi_pk", "psi_closed_form", "ladder", "ladder_se", "path", "path_se", "path_truncated_fraction"});
    for (std::size_t i = 0; i < u_list.size(); ++i) {
        const double u = u_list[i];
        const double pk = psi.at(u);
        std::optional<double> closed;
        if (mu) closed = exponential_closed_form(*mu, m.lambda, c, u).psi;
        std::vector<std::string> row{cell(u), cell(pk), cell(closed), "", "", "", "", ""};
        if (ladder) {
            row[3] = cell(ladder_est[i].estimate);
            row[4] = cell(ladder_est[i].standard_error);
            check("ladder psi(" + format_number(u) + ")", pk, ladder_est[i].estimate, binomial_se(pk));
        }
        if (path) {
            const auto est = estimate_psi_path(spec, u, cfg.simulation);
            row[5] = cell(est.psi.estimate);
            row[6] = cell(est.psi.standard_error);
            row[7] = cell(est.truncated_fraction);
            check("path psi(" + format_number(u) + ")", pk, est.psi.estimate, binomial_se(pk));
        }
        table.row(std::move(row));
    }

    CsvTable times({"u", "analytic", "analytic_method", "monte_carlo", "monte_carlo_se", "ruined", "note"});
    if (path) {
        for (double u : u_list) {
            std::optional<double> analytic;
            std::string how;
            if (mu) {
                analytic = exponential_closed_form(*mu, m.lambda, c, u).expected_ruin_time;
                how = "closed-form";
            } else if (u == 0.0 && std::isfinite(m.y1_second_moment)) {
                analytic = expected_ruin_time_zero(m, c);
                how = "closed-form";
            }
            try {
                const auto est = estimate_ruin_time(spec, cfg.simulation, u);
                times.row({cell(u), cell(analytic), how, cell(est.mean.estimate), cell(est.mean.standard_error),
                           std::to_string(est.ruined), ""});
                if (analytic) check("E tau(" + format_number(u) + ")", *analytic, est.mean.estimate, est.mean.standard_error);
            } catch (const NoRuinObserved& e) {
                times.row({cell(u), cell(analytic), how, "", "", "0", "warning: no ruin observed"});
                err << "warning: " << e.what() << '\n';
            }
        }
    }

    const fs::path dir(flags.out_dir);
    fs::create_directories(dir);
    table.write(dir / "simulate.csv");
    if (path) times.write(dir / "ruin_time.csv");
    out << table.str();
    if (path) out << times.str();
    out << "replications = " << n << ", seed = " << cfg.simulation.seed << '\n';

    if (flags.check && !failures.empty()) {
        for (const auto& f : failures) err << "check failed: " << f << " differs by more than 4 standard errors\n";
        return kExitCheck;
    }
    if (flags.check) out << "check passed\n";
    return kExitOk;
}

int equivalence(const std::string& a, const std::string& b, const std::string& out_dir, std::ostream& out) {
    const auto ca = load_config(a);
    const auto cb = load_config(b);
    const auto report = equivalence_report(ca.spec, cb.spec);
    CsvTable table({"quantity", "a", "b", "delta", "tolerance", "agree"});
    for (const auto& r : report.rows) {
        table.row({r.quantity, cell(r.a), cell(r.b), cell(r.delta), cell(r.tolerance), r.agree ? "yes" : "NO"});
    }
    out << table.str();
    out << (report.equivalent ? "EQUIVALENT" : "DIFFERENT") << '\n';
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        table.write(fs::path(out_dir) / "equivalence.csv");
    }
    return report.equivalent ? kExitOk : kExitCheck;
}

int catalog(const std::vector<std::string>& words, std::ostream& out) {
    if (words.empty() || (words.size() == 1 && words[0] == "list")) {
        for (const auto& p : preset_catalog()) {
            out << p.id << "  " << p.name << "  (d=" << p.dim << ")  " << p.title << '\n';
        }
        return kExitOk;
    }
    if (words.size() == 2 && words[0] == "show") {
        const auto& p = preset_info(words[1]);
        out << p.name << "  #" << p.id << '\n' << p.title << '\n' << "types: " << p.dim << '\n';
        out << "parameters:\n";
        for (const auto& param : p.params) {
            out << "  " << param.name << " = ";
            for (std::size_t i = 0; i < param.defaults.size(); ++i) out << (i ? "," : "") << format_number(param.defaults[i]);
            out << "  (" << param.meaning << ")\n";
        }
        return kExitOk;
    }
    throw SchemaError("usage: catalog [list | show NAME]");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ruinctl: ruin analytics for multivariate compound Poisson risk models", "ruinctl"};
    app.require_subcommand(1);

    ModelSource analyze_src;
    std::optional<double> step, tol;
    std::optional<std::size_t> points;
    std::string analyze_out = "ruin-report";
    auto* an = app.add_subcommand("analyze", "reduce a model and compute its ruin characteristics");
    analyze_src.attach(an);
    an->add_option("--step", step, "lattice step h");
    an->add_option("--points", points, "lattice points");
    an->add_option("--tol", tol, "Pollaczek-Khinchin truncation tolerance");
    an->add_option("--out", analyze_out, "output directory");

    ModelSource sim_src;
    SimulateFlags sim;
    auto* sm = app.add_subcommand("simulate", "Monte Carlo estimates next to the analytic values");
    sim_src.attach(sm);
    sm->add_option("--method", sim.method, "ladder, path or both")->check(CLI::IsMember({"ladder", "path", "both"}));
    sm->add_option("--reps", sim.reps, "replications");
    sm->add_option("--seed", sim.seed, "64-bit seed");
    sm->add_option("--horizon", sim.horizon, "time cap for path simulation");
    sm->add_option("--u", sim.u, "initial capitals")->delimiter(',');
    sm->add_flag("--check", sim.check, "exit 4 when a Monte Carlo estimate misses its analytic value by > 4 se");
    sm->add_option("--out", sim.out_dir, "output directory");

    std::string eq_a, eq_b, eq_out;
    auto* eq = app.add_subcommand("equivalence", "compare the aggregate-claim layers of two models");
    eq->add_option("a", eq_a, "first config")->required();
    eq->add_option("b", eq_b, "second config")->required();
    eq->add_option("--out", eq_out, "optional output directory");

    std::vector<std::string> cat_words;
    auto* cat = app.add_subcommand("catalog", "list or show the preset models");
    cat->add_option("words", cat_words, "list | show NAME");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (an->parsed()) return analyze(analyze_src, step, points, tol, analyze_out, out);
        if (sm->parsed()) return simulate(sim_src, sim, out, err);
        if (eq->parsed()) return equivalence(eq_a, eq_b, eq_out, out);
        if (cat->parsed()) return catalog(cat_words, out);
    } catch (const ConfigParseError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvalidParams& e) {
        err << "invalid parameters: " << e.what() << '\n';
        return kExitConfig;
    } catch (const UnknownPreset& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NetProfitViolated& e) {
        err << "error: " << e.what() << '\n';
        return kExitNetProfit;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace ruin::cli
