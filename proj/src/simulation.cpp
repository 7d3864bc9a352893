#include "ruin/simulation.hpp"

#include "ruin/errors.hpp"
#include "ruin/ruin_analytics.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ruin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Replications per reduction chunk. Chunks are summed in index order, so the
// result does not depend on the thread count.
constexpr std::uint64_t kChunk = 4096;

std::uint64_t chunk_count(std::uint64_t n) { return (n + kChunk - 1) / kChunk; }

CounterRng replication_rng(const SimulationConfig& cfg, std::uint64_t r) {
    return CounterRng(cfg.seed, r * cfg.stream_stride);
}

// Runs body(r, acc) for every replication with one accumulator per chunk and
// folds the chunks in order.
template <class Acc, class Body, class Fold>
Acc chunked(const SimulationConfig& cfg, Acc init, Body body, Fold fold) {
    const std::uint64_t chunks = chunk_count(cfg.replications);
    std::vector<Acc> parts(chunks, init);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(chunks); ++k) {
        const auto first = static_cast<std::uint64_t>(k) * kChunk;
        const auto last = std::min(cfg.replications, first + kChunk);
        for (std::uint64_t r = first; r < last; ++r) body(r, parts[static_cast<std::size_t>(k)]);
    }
    Acc total = init;
    for (auto& p : parts) fold(total, p);
    return total;
}

struct MeanAcc {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t n = 0;
    std::uint64_t other = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
};

void fold_mean(MeanAcc& into, const MeanAcc& part) {
    into.sum += part.sum;
    into.sum_sq += part.sum_sq;
    into.n += part.n;
    into.other += part.other;
}

EstimateWithCI sample_mean(const MeanAcc& acc) {
    if (acc.n == 0) return {};
    const double n = static_cast<double>(acc.n);
    const double mean = acc.sum / n;
    const double var = acc.n > 1 ? std::max(0.0, (acc.sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n), acc.n};
}

}  // namespace

void SimulationConfig::validate() const {
    if (replications < 1) throw InvalidParams("simulation: replications must be >= 1");
    if (!(horizon > 0.0)) throw InvalidParams("simulation: horizon must be positive");
    if (stream_stride < 1) throw InvalidParams("simulation: stream_stride must be >= 1");
}

EstimateWithCI proportion(std::uint64_t hits, std::uint64_t n) {
    if (n == 0) return {};
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n};
}

const std::vector<int>& PathSimulator::CountSampler::draw(CounterRng& rng) const {
    const double x = rng.uniform() * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    const auto k = std::min(static_cast<std::size_t>(it - cumulative.begin()), counts.size() - 1);
    return counts[k];
}

PathSimulator::PathSimulator(const RiskModelSpec& spec) : spec_(spec) {
    spec_.validate();
    for (const auto& g : spec_.groups) {
        CountSampler s;
        double acc = 0.0;
        for (const auto& a : g.atoms()) {
            acc += a.prob;
            s.cumulative.push_back(acc);
            s.counts.push_back(a.counts);
        }
        samplers_.push_back(std::move(s));
    }
    const auto law = reduce_law(spec_);
    const auto loading = safety_loading(law, spec_.premium_rate);
    if (loading.net_profit) {
        eps_ = lundberg_exponent(law, spec_.premium_rate);
        if (eps_) escape_offset_ = std::log(1e4 * (1.0 + loading.rho)) / *eps_;
    }
}

double PathSimulator::escape_level(double u) const { return eps_ ? u + escape_offset_ : kInf; }

std::vector<int> PathSimulator::draw_counts(std::size_t stream, CounterRng& rng) const {
    const auto& c = samplers_[stream].draw(rng);
    if (spec_.arrivals.mode == ArrivalSpec::Mode::single_stream) return c;
    std::vector<int> counts(spec_.dim(), 0);
    counts[stream] = c[0];
    return counts;
}

PathOutcome PathSimulator::run(double u, double horizon, CounterRng& rng, std::vector<PathEvent>* log) const {
    const auto& rates = spec_.arrivals.intensities;
    const std::size_t streams = rates.size();
    const double c = spec_.premium_rate;
    const double escape = escape_level(u);

    std::vector<double> next(streams);
    for (std::size_t s = 0; s < streams; ++s) next[s] = rng.exponential(rates[s]);

    PathOutcome out;
    double claims_total = 0.0;
    while (true) {
        const auto s = static_cast<std::size_t>(std::min_element(next.begin(), next.end()) - next.begin());
        const double t = next[s];
        if (t > horizon) {
            out.truncated = true;
            return out;
        }
        const auto counts = draw_counts(s, rng);
        double claim = 0.0;
        for (std::size_t type = 0; type < counts.size(); ++type)
            for (int i = 0; i < counts[type]; ++i) claim += spec_.claims[type].sample(rng);

        const double before = u + c * t - claims_total;
        claims_total += claim;
        const double after = before - claim;
        if (log) log->push_back({t, counts, claim, after});
        if (after < 0.0) {
            out.ruined = true;
            out.ruin_time = t;
            out.deficit = -after;
            out.surplus_before = before;
            out.ruin_claim = claim;
            return out;
        }
        // surplus only grows until the next arrival, so checking here is enough
        if (after >= escape) {
            out.escaped = true;
            return out;
        }
        next[s] = t + rng.exponential(rates[s]);
    }
}

std::vector<int> PathSimulator::counts_until(double t, CounterRng& rng) const {
    const auto& rates = spec_.arrivals.intensities;
    std::vector<int> totals(spec_.dim(), 0);
    for (std::size_t s = 0; s < rates.size(); ++s) {
        for (double clock = rng.exponential(rates[s]); clock <= t; clock += rng.exponential(rates[s])) {
            const auto counts = draw_counts(s, rng);
            for (std::size_t type = 0; type < totals.size(); ++type) totals[type] += counts[type];
        }
    }
    return totals;
}

PathOutcome simulate_path(const RiskModelSpec& spec, double u, const SimulationConfig& cfg, CounterRng& rng,
                          std::vector<PathEvent>* log) {
    return PathSimulator(spec).run(u, cfg.horizon, rng, log);
}

PathPsiEstimate estimate_psi_path(const RiskModelSpec& spec, double u, const SimulationConfig& cfg) {
    cfg.validate();
    const PathSimulator sim(spec);
    const auto acc = chunked(
        cfg, MeanAcc{},
        [&](std::uint64_t r, MeanAcc& a) {
            auto rng = replication_rng(cfg, r);
            const auto out = sim.run(u, cfg.horizon, rng);
            a.add(out.ruined ? 1.0 : 0.0);
            if (out.truncated) ++a.other;
        },
        fold_mean);
    return {proportion(static_cast<std::uint64_t>(acc.sum), acc.n),
            static_cast<double>(acc.other) / static_cast<double>(acc.n)};
}

double sample_fi(const GriddedDistribution& fi, double p) {
    const double top = fi.values().back();
    if (p < top) return fi.quantile(p);
    // past the lattice: exponential tail with the hazard of the last cell
    const auto n = fi.size();
    const double tail = 1.0 - top;
    const double cell = top - fi.values()[n - 2];
    if (!(tail > 0.0) || !(cell > 0.0)) return fi.upper();
    const double hazard = cell / (fi.step() * tail);
    return fi.upper() - std::log((1.0 - p) / tail) / hazard;
}

std::vector<EstimateWithCI> estimate_psi_ladder(const ReducedClModel& m, double c, std::span<const double> u,
                                                const SimulationConfig& cfg) {
    cfg.validate();
    const double q = ruin_at_zero(m, c).psi0;
    double u_max = 0.0;
    for (double x : u) u_max = std::max(u_max, x);
    using Hits = std::vector<std::uint64_t>;
    const auto hits = chunked(
        cfg, Hits(u.size(), 0),
        [&](std::uint64_t r, Hits& h) {
            auto rng = replication_rng(cfg, r);
            double sum = 0.0;
            // each ladder step occurs with probability psi(0); stop once every u is exceeded
            while (sum <= u_max && rng.uniform() < q) sum += sample_fi(m.fi_grid, rng.uniform());
            for (std::size_t i = 0; i < u.size(); ++i)
                if (sum > u[i]) ++h[i];
        },
        [](Hits& into, const Hits& part) {
            for (std::size_t i = 0; i < into.size(); ++i) into[i] += part[i];
        });
    std::vector<EstimateWithCI> out;
    for (auto k : hits) out.push_back(proportion(k, cfg.replications));
    return out;
}

EstimateWithCI estimate_psi_ladder(const ReducedClModel& m, double c, double u, const SimulationConfig& cfg) {
    const double grid[] = {u};
    return estimate_psi_ladder(m, c, grid, cfg).front();
}

RuinTimeEstimate estimate_ruin_time(const RiskModelSpec& spec, const SimulationConfig& cfg, double u) {
    cfg.validate();
    const auto law = reduce_law(spec);
    ruin_at_zero(law, spec.premium_rate);  // net profit check
    const PathSimulator sim(spec);
    const auto acc = chunked(
        cfg, MeanAcc{},
        [&](std::uint64_t r, MeanAcc& a) {
            auto rng = replication_rng(cfg, r);
            const auto out = sim.run(u, cfg.horizon, rng);
            if (out.ruined) a.add(out.ruin_time);
            if (out.truncated) ++a.other;
        },
        fold_mean);
    if (acc.n == 0) {
        std::ostringstream os;
        os << "no ruined path among " << cfg.replications << " replications at u = " << u;
        throw NoRuinObserved(os.str());
    }
    return {sample_mean(acc), acc.n, static_cast<double>(acc.other) / static_cast<double>(cfg.replications)};
}

EstimateWithCI DeficitSample::joint_survival(double x, double y) const {
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < deficit.size(); ++i)
        if (deficit[i] > x && surplus_before[i] > y) ++hits;
    return proportion(hits, deficit.size());
}

DeficitSample empirical_deficit(const RiskModelSpec& spec, const GriddedDistribution& fi, const SimulationConfig& cfg) {
    cfg.validate();
    const PathSimulator sim(spec);
    struct Acc {
        std::vector<double> deficit, before, claim;
    };
    auto acc = chunked(
        cfg, Acc{},
        [&](std::uint64_t r, Acc& a) {
            auto rng = replication_rng(cfg, r);
            const auto out = sim.run(0.0, cfg.horizon, rng);
            if (!out.ruined) return;
            a.deficit.push_back(out.deficit);
            a.before.push_back(out.surplus_before);
            a.claim.push_back(out.ruin_claim);
        },
        [](Acc& into, const Acc& part) {
            into.deficit.insert(into.deficit.end(), part.deficit.begin(), part.deficit.end());
            into.before.insert(into.before.end(), part.before.begin(), part.before.end());
            into.claim.insert(into.claim.end(), part.claim.begin(), part.claim.end());
        });
    const std::size_t n = acc.deficit.size();
    if (n == 0) throw NoRuinObserved("no ruined path started from zero capital");

    std::vector<double> sorted = acc.deficit;
    std::sort(sorted.begin(), sorted.end());
    double ks = 0.0;
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = fi.cdf(sorted[i]);
        ks = std::max({ks, static_cast<double>(i + 1) / nd - f, f - static_cast<double>(i) / nd});
    }
    MeanAcc claims;
    for (double x : acc.claim) claims.add(x);
    return DeficitSample{std::move(acc.deficit), std::move(acc.before), std::move(acc.claim), cfg.replications, ks,
                         1.628 / std::sqrt(nd), sample_mean(claims)};
}

std::vector<EstimateWithCI> simulate_counts(const RiskModelSpec& spec, double t, const SimulationConfig& cfg) {
    cfg.validate();
    const PathSimulator sim(spec);
    const std::size_t d = spec.dim();
    using Accs = std::vector<MeanAcc>;
    const auto acc = chunked(
        cfg, Accs(d),
        [&](std::uint64_t r, Accs& a) {
            auto rng = replication_rng(cfg, r);
            const auto counts = sim.counts_until(t, rng);
            for (std::size_t s = 0; s < d; ++s) a[s].add(counts[s]);
        },
        [](Accs& into, const Accs& part) {
            for (std::size_t s = 0; s < into.size(); ++s) fold_mean(into[s], part[s]);
        });
    std::vector<EstimateWithCI> out;
    for (const auto& a : acc) out.push_back(sample_mean(a));
    return out;
}

}  // namespace ruin
