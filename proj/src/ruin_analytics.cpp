#include "ruin/ruin_analytics.hpp"

#include "ruin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ruin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_net_profit(const ReducedLaw& m, double c) {
    if (!(c > m.lambda * m.y1_mean)) {
        std::ostringstream os;
        os << "net profit condition c > lambda E Y1 fails: c = " << c << ", lambda E Y1 = " << m.lambda * m.y1_mean
           << "; ruin is certain for every initial capital";
        throw NetProfitViolated(os.str());
    }
}

std::size_t nodes_to_cover(double step, double u_max) {
    return static_cast<std::size_t>(std::ceil(u_max / step - 1e-9));
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::closed_form: return "closed-form";
        case Method::lattice: return "lattice";
        case Method::monte_carlo: return "monte-carlo";
        case Method::root_find: return "root-find";
    }
    return "unknown";
}

SafetyLoading safety_loading(const ReducedLaw& m, double c) {
    if (!std::isfinite(m.y1_mean)) throw InfiniteMean("safety loading needs a finite E Y1");
    const double rho = c / (m.lambda * m.y1_mean) - 1.0;
    return {rho, rho > 0.0};
}

RuinAtZero ruin_at_zero(const ReducedLaw& m, double c) {
    require_net_profit(m, c);
    const double psi0 = m.lambda * m.y1_mean / c;
    return {psi0, 1.0 - psi0};
}

double expected_ruin_time_zero(const ReducedLaw& m, double c) {
    require_net_profit(m, c);
    if (!std::isfinite(m.y1_second_moment)) throw InfiniteVariance("E(tau(0) | ruin) needs a finite variance of Y1");
    return m.y1_second_moment / (2.0 * m.y1_mean * (c - m.lambda * m.y1_mean));
}

double lundberg_function(const ReducedLaw& m, double c, double eps) {
    return m.y1_lst(-eps) - 1.0 - c / m.lambda * eps;
}

std::optional<double> lundberg_exponent(const ReducedLaw& m, double c) {
    require_net_profit(m, c);
    const auto h = [&](double e) { return lundberg_function(m, c, e); };

    // Bracket: h < 0 just right of 0 and convex, so walk up until it turns
    // positive. If the transform gives out first, close in on its boundary.
    double lo = 0.0;
    double hi = 1e-6;
    bool bracketed = false;
    while (hi < 1e8) {
        if (!m.y1_lst_defined(-hi)) break;
        if (h(hi) > 0.0) {
            bracketed = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if (!bracketed) {
        if (hi >= 1e8) return std::nullopt;
        double bad = hi;
        while (bad - lo > 1e-13 * std::max(bad, 1e-12)) {
            const double mid = 0.5 * (lo + bad);
            if (!m.y1_lst_defined(-mid)) {
                bad = mid;
            } else if (h(mid) > 0.0) {
                hi = mid;
                bracketed = true;
                break;
            } else {
                lo = mid;
            }
        }
        if (!bracketed) return std::nullopt;
    }
    while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (h(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double calibrate_premium(const ReducedLaw& m, double alpha, double u) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParams("calibrate_premium: alpha must lie in (0,1)");
    if (!(u > 0.0)) throw InvalidParams("calibrate_premium: u must be positive");
    const double eps = -std::log(alpha) / u;
    if (!m.y1_lst_defined(-eps)) {
        std::ostringstream os;
        os << "calibrate_premium: the claim transform diverges at the target exponent " << eps;
        throw DivergentTransform(os.str());
    }
    // h(eps) = 0 is linear in c.
    return m.lambda * (m.y1_lst(-eps) - 1.0) / eps;
}

std::optional<double> exponential_rate(const ReducedLaw& m) {
    std::optional<double> rate;
    for (const auto& a : m.groups.atoms()) {
        int total = 0;
        std::size_t type = 0;
        for (std::size_t s = 0; s < a.counts.size(); ++s) {
            total += a.counts[s];
            if (a.counts[s] > 0) type = s;
        }
        if (total != 1) return std::nullopt;
        const auto* e = std::get_if<Exponential>(&m.claims[type].family());
        if (!e || (rate && *rate != e->rate)) return std::nullopt;
        rate = e->rate;
    }
    return rate;
}

ExponentialClosedForm exponential_closed_form(double mu, double lambda, double c, double u) {
    if (!(mu > 0.0 && lambda > 0.0 && c > 0.0)) throw InvalidParams("exponential closed form: mu, lambda, c must be positive");
    if (!(c * mu > lambda)) {
        std::ostringstream os;
        os << "net profit condition c > lambda / mu fails: c = " << c << ", lambda / mu = " << lambda / mu;
        throw NetProfitViolated(os.str());
    }
    ExponentialClosedForm out{};
    out.rho = c * mu / lambda - 1.0;
    out.psi0 = lambda / (c * mu);
    out.epsilon = mu - lambda / c;
    out.psi = out.psi0 * std::exp(-out.epsilon * u);
    out.delta = 1.0 - out.psi;
    out.expected_ruin_time = (c + lambda * u) / (c * (c * mu - lambda));
    return out;
}

double LatticeCurve::at(double u) const {
    if (!(u >= 0.0)) throw InvalidParams("curve evaluated at a negative or NaN capital");
    const double t = u / step;
    const double last = static_cast<double>(values.size() - 1);
    if (t > last + 1e-9) {
        std::ostringstream os;
        os << "u = " << u << " lies beyond the lattice end " << upper();
        throw GridTooCoarse(os.str());
    }
    const auto k = std::min(static_cast<std::size_t>(t), values.size() - 1);
    if (k + 1 >= values.size()) return values.back();
    const double w = t - static_cast<double>(k);
    return values[k] + w * (values[k + 1] - values[k]);
}

std::vector<double> LatticeCurve::sample(std::span<const double> u_grid) const {
    std::vector<double> out;
    out.reserve(u_grid.size());
    for (double u : u_grid) out.push_back(at(u));
    return out;
}

PsiCurve psi_pollaczek_khinchin(const ReducedClModel& m, double c, double tol) {
    const double q = ruin_at_zero(m, c).psi0;
    if (!(tol > 0.0 && tol < 1.0)) throw InvalidParams("psi_pollaczek_khinchin: tol must lie in (0,1)");
    int needed = 0;
    while (std::pow(q, needed + 1) / (1.0 - q) >= tol) ++needed;
    int used = 1;
    while (used < needed + 1) used *= 2;

    const std::size_t points = m.fi_grid.size();
    const std::size_t len = half_length(points);
    auto power = discretize(m.fi_grid);
    power.mass.resize(len, 0.0);
    auto partial = unit_mass(m.fi_grid.step(), points);

    // partial = sum_{i<k} q^i F_I^{i*}, power = F_I^{k*}, qk = q^k
    double qk = q;
    for (int k = 1; k < used; k *= 2) {
        axpy(qk, convolve(power, partial, len), partial);
        power = convolve(power, power, len);
        qk *= qk;
    }
    const auto sums = node_sums(partial, points);
    const auto tail = node_sums(power, points);

    PsiCurve curve{{m.fi_grid.step(), std::vector<double>(points)}, q, needed, used, qk};
    double running = q;
    for (std::size_t j = 0; j < points; ++j) {
        const double psi = 1.0 - qk * tail[j] - (1.0 - q) * sums[j];
        running = std::min(running, std::clamp(psi, 0.0, q));
        curve.values[j] = running;
    }
    return curve;
}

std::vector<double> psi_pollaczek_khinchin(const ReducedClModel& m, double c, std::span<const double> u_grid,
                                           double tol) {
    return psi_pollaczek_khinchin(m, c, tol).sample(u_grid);
}

LatticeCurve delta_renewal_solve(const ReducedClModel& m, double c, double u_max) {
    const double q = ruin_at_zero(m, c).psi0;
    const double h = m.fi_grid.step();
    const std::size_t nodes = nodes_to_cover(h, u_max);
    if (nodes + 1 > m.fi_grid.size()) {
        std::ostringstream os;
        os << "delta_renewal_solve: u_max = " << u_max << " lies beyond the lattice end " << m.fi_grid.upper();
        throw GridTooCoarse(os.str());
    }
    const auto f = m.fi_grid.cell_masses();
    std::vector<double> d(nodes + 1);
    d[0] = 1.0 - q;
    const double diag = 1.0 - 0.5 * q * f[0];
    for (std::size_t j = 1; j <= nodes; ++j) {
        double acc = 0.5 * f[0] * d[j - 1];
        for (std::size_t k = 1; k < j; ++k) acc += 0.5 * f[k] * (d[j - k] + d[j - k - 1]);
        d[j] = ((1.0 - q) + q * acc) / diag;
    }
    return {h, std::move(d)};
}

std::vector<double> delta_renewal_solve(const ReducedClModel& m, double c, std::span<const double> u_grid) {
    double u_max = 0.0;
    for (double u : u_grid) u_max = std::max(u_max, u);
    return delta_renewal_solve(m, c, std::max(u_max, m.fi_grid.step())).sample(u_grid);
}

GerberShiuGrid gerber_shiu_solve(const ReducedClModel& m, double c, std::span<const double> u_grid,
                                 std::span<const double> y_grid) {
    require_net_profit(m, c);
    const double h = m.y1_grid.step();
    double u_max = h;
    for (double u : u_grid) u_max = std::max(u_max, u);
    const std::size_t nodes = nodes_to_cover(h, u_max);
    if (nodes + 1 > m.y1_grid.size()) {
        std::ostringstream os;
        os << "gerber_shiu_solve: u = " << u_max << " lies beyond the lattice end " << m.y1_grid.upper();
        throw GridTooCoarse(os.str());
    }
    const std::size_t ny = y_grid.size();
    std::vector<double> bar(nodes + 1);
    for (std::size_t k = 0; k <= nodes; ++k) bar[k] = 1.0 - m.y1_grid.values()[k];
    const double ratio = m.lambda / c;
    const double diag = 1.0 - 0.5 * ratio * h * bar[0];

    // g[j][i] = G(j h, y_i)
    std::vector<std::vector<double>> g(nodes + 1, std::vector<double>(ny));
    std::vector<double> acc(ny);
    for (std::size_t j = 0; j <= nodes; ++j) {
        const double uj = static_cast<double>(j) * h;
        const double fu = m.fi_grid.cdf(uj);
        for (std::size_t i = 0; i < ny; ++i) acc[i] = m.y1_mean * (m.fi_grid.cdf(uj + y_grid[i]) - fu);
        if (j > 0) {
            for (std::size_t k = 1; k < j; ++k) {
                const double w = h * bar[k];
                const auto& row = g[j - k];
                for (std::size_t i = 0; i < ny; ++i) acc[i] += w * row[i];
            }
            const double w0 = 0.5 * h * bar[j];
            for (std::size_t i = 0; i < ny; ++i) acc[i] += w0 * g[0][i];
        }
        const double scale = j > 0 ? ratio / diag : ratio;
        for (std::size_t i = 0; i < ny; ++i) g[j][i] = std::clamp(scale * acc[i], 0.0, 1.0);
    }

    GerberShiuGrid out{{u_grid.begin(), u_grid.end()}, {y_grid.begin(), y_grid.end()}, {}};
    out.g.reserve(u_grid.size());
    for (double u : u_grid) {
        const double t = u / h;
        const auto k = std::min(static_cast<std::size_t>(t), nodes);
        const auto k1 = std::min(k + 1, nodes);
        const double w = std::clamp(t - static_cast<double>(k), 0.0, 1.0);
        std::vector<double> row(ny);
        for (std::size_t i = 0; i < ny; ++i) row[i] = g[k][i] + w * (g[k1][i] - g[k][i]);
        out.g.push_back(std::move(row));
    }
    return out;
}

DeficitLaws deficit_laws_at_zero(const ReducedClModel& m) {
    const auto& y = m.y1_grid;
    const double h = y.step();
    std::vector<double> biased(y.size(), 0.0);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < y.size(); ++k) {
        acc += (y.values()[k + 1] - y.values()[k]) * (static_cast<double>(k) + 0.5) * h;
        biased[k + 1] = std::min(1.0, acc / m.y1_mean);
    }
    const bool finite = std::isfinite(m.y1_second_moment);
    std::optional<std::string> issue;
    if (!finite) issue = "E Y1^2 is infinite: the claim causing ruin has infinite mean";
    return DeficitLaws{m.fi_grid,
                       finite ? m.y1_second_moment / (2.0 * m.y1_mean) : kInf,
                       GriddedDistribution::from_values(h, std::move(biased)),
                       finite ? m.y1_second_moment / m.y1_mean : kInf,
                       issue};
}

std::optional<double> cl_approximation(const ReducedClModel& m, double c, std::optional<double> eps) {
    if (!eps) return std::nullopt;
    const auto rho = safety_loading(m, c).rho;
    // Past F_I-bar ~ 1e-12 the lattice survival is round-off, which the
    // exponential weight would blow up.
    const auto& v = m.fi_grid.values();
    std::size_t used = 1;
    while (used < v.size() && 1.0 - v[used] >= 1e-12) ++used;
    auto f = m.fi_grid.cell_masses();
    f.resize(std::min(f.size(), used));
    const double h = m.fi_grid.step();
    const std::size_t tail_from = f.size() - std::max<std::size_t>(1, f.size() / 20);
    double total = 0.0;
    double tail = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double x = (static_cast<double>(k) + 0.5) * h;
        const double term = f[k] * x * std::exp(*eps * x);
        total += term;
        if (k >= tail_from) tail += term;
    }
    if (!std::isfinite(total) || !(total > 0.0) || tail > 1e-4 * total) return std::nullopt;
    return rho / (*eps * total);
}

HeavyTailRatio heavy_tail_asymptotic(const ReducedClModel& m, double c, const PsiCurve& psi,
                                     std::span<const double> u_grid) {
    const double rho = safety_loading(m, c).rho;
    const auto& fi = m.fi_grid;
    // Trust psi where the series truncation and the F_I tail are both far
    // above round-off, and stay clear of the last stretch of the lattice.
    double reliable = 0.0;
    const std::size_t last = std::min(psi.values.size(), fi.size()) - 1;
    for (std::size_t k = 1; k <= last * 19 / 20; ++k) {
        const double bar = 1.0 - fi.values()[k];
        if (bar < 1e-9 || psi.truncation_error > 1e-3 * psi.values[k]) break;
        reliable = fi.node(k);
    }
    HeavyTailRatio out{{}, {}, 1.0 / rho, m.heavy_tailed(), reliable};
    for (double u : u_grid) {
        if (u > reliable) continue;
        const double bar = 1.0 - fi.cdf(u);
        out.u.push_back(u);
        out.ratio.push_back(psi.at(u) / bar);
    }
    return out;
}

HeavyTailRatio heavy_tail_asymptotic(const ReducedClModel& m, double c) {
    const auto psi = psi_pollaczek_khinchin(m, c, 1e-12);
    auto probe = heavy_tail_asymptotic(m, c, psi, std::vector<double>{});
    const double lo = m.y1_mean;
    const double hi = probe.reliable_u;
    std::vector<double> grid;
    if (hi > lo) {
        constexpr int kPoints = 61;
        for (int i = 0; i < kPoints; ++i) grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (kPoints - 1)));
        grid.back() = hi;
    }
    return heavy_tail_asymptotic(m, c, psi, grid);
}

RuinReport analyze(const ReducedClModel& m, double c, double tol) {
    const auto loading = safety_loading(m, c);
    const auto zero = ruin_at_zero(m, c);
    std::optional<Flagged<double>> tau;
    if (std::isfinite(m.y1_second_moment)) tau = Flagged<double>{expected_ruin_time_zero(m, c), Method::closed_form};

    std::optional<Flagged<double>> eps;
    std::optional<Flagged<double>> constant;
    if (const auto mu = exponential_rate(m)) {
        const auto exact = exponential_closed_form(*mu, m.lambda, c, 0.0);
        eps = Flagged<double>{exact.epsilon, Method::closed_form};
        constant = Flagged<double>{exact.psi0, Method::closed_form};
    } else if (const auto root = lundberg_exponent(m, c)) {
        eps = Flagged<double>{*root, Method::root_find};
        if (const auto cl = cl_approximation(m, c, *root)) constant = Flagged<double>{*cl, Method::lattice};
    }
    return RuinReport{{loading.rho, Method::closed_form},
                      {zero.psi0, Method::closed_form},
                      {zero.delta0, Method::closed_form},
                      tau,
                      eps,
                      constant,
                      psi_pollaczek_khinchin(m, c, tol)};
}

}  // namespace ruin
