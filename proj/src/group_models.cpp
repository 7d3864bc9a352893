#include "ruin/group_models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace ruin {

namespace {

constexpr double kSumTolerance = 1e-9;
constexpr double kDegenerateTolerance = 1e-12;

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParams(what);
}

bool valid_probability(double p) { return p > 0.0 && p < 1.0; }

// Univariate pmf from a recursion, cut where the remaining tail drops below the bound.
template <class Next>
std::vector<double> truncated_pmf(double first, Next next, int& cut) {
    std::vector<double> pmf{first};
    double acc = first;
    for (int k = 1; 1.0 - acc >= kCountTruncationTail; ++k) {
        if (k > 1'000'000) throw InvalidParams("count law needs more than 1e6 support points");
        pmf.push_back(next(k, pmf.back()));
        acc += pmf.back();
    }
    cut = static_cast<int>(pmf.size()) - 1;
    return pmf;
}

void compositions(int total, std::size_t parts, std::vector<int>& current, std::size_t pos,
                  const std::function<void(const std::vector<int>&)>& emit) {
    if (pos + 1 == parts) {
        current[pos] = total;
        emit(current);
        return;
    }
    for (int k = 0; k <= total; ++k) {
        current[pos] = k;
        compositions(total - k, parts, current, pos + 1, emit);
    }
}

}  // namespace

GroupSizeModel::GroupSizeModel(std::size_t dim, std::vector<CountAtom> atoms, std::string family,
                               std::optional<int> truncation, Domain pgf_domain)
    : dim_(dim), family_(std::move(family)), truncation_(truncation), domain_(std::move(pgf_domain)) {
    require(dim_ >= 1, "group model: dimension must be at least 1");
    std::map<std::vector<int>, double> merged;
    for (auto& a : atoms) {
        require(a.counts.size() == dim_, "group model: count vector of the wrong dimension");
        require(std::all_of(a.counts.begin(), a.counts.end(), [](int c) { return c >= 0; }),
                "group model: negative claim count");
        require(std::isfinite(a.prob) && a.prob >= 0.0, "group model: probabilities must be finite and >= 0");
        if (a.prob > 0.0) merged[std::move(a.counts)] += a.prob;
    }
    double total = 0.0;
    for (const auto& [counts, p] : merged) total += p;
    if (std::abs(total - 1.0) > kSumTolerance) {
        std::ostringstream os;
        os << "group model: probabilities sum to " << total << ", not 1";
        throw InvalidParams(os.str());
    }
    atoms_.reserve(merged.size());
    for (auto& [counts, p] : merged) atoms_.push_back({counts, p / total});
    if (p0() >= 1.0 - kDegenerateTolerance) {
        throw DegenerateModel("group model: all mass on the empty group");
    }
}

GroupSizeModel GroupSizeModel::from_pmf(std::vector<double> pmf) {
    require(!pmf.empty(), "pmf: empty probability vector");
    std::vector<CountAtom> atoms;
    for (std::size_t k = 0; k < pmf.size(); ++k) atoms.push_back({{static_cast<int>(k)}, pmf[k]});
    return GroupSizeModel(1, std::move(atoms), "pmf");
}

GroupSizeModel GroupSizeModel::point_mass(std::vector<int> counts) {
    const auto d = counts.size();
    return GroupSizeModel(d, {{std::move(counts), 1.0}}, "point-mass");
}

GroupSizeModel GroupSizeModel::uniform_order_k(int k) {
    require(k >= 1, "uniform-order-k: k must be >= 1");
    std::vector<CountAtom> atoms;
    for (int i = 1; i <= k; ++i) atoms.push_back({{i}, 1.0 / k});
    return GroupSizeModel(1, std::move(atoms), "uniform-order-k");
}

GroupSizeModel GroupSizeModel::truncated_geometric_order_k(double p, int k) {
    require(valid_probability(p), "truncated-geometric-order-k: p must lie in (0,1)");
    require(k >= 1, "truncated-geometric-order-k: k must be >= 1");
    const double norm = -std::expm1(k * std::log1p(-p));
    std::vector<CountAtom> atoms;
    for (int i = 1; i <= k; ++i) atoms.push_back({{i}, p * std::pow(1.0 - p, i - 1) / norm});
    return GroupSizeModel(1, std::move(atoms), "truncated-geometric-order-k");
}

GroupSizeModel GroupSizeModel::negative_binomial(double n, double p) {
    require(n > 0.0 && std::isfinite(n), "neg-binomial: n must be positive");
    require(valid_probability(p), "neg-binomial: p must lie in (0,1)");
    int cut = 0;
    const auto pmf = truncated_pmf(std::pow(p, n), [&](int k, double prev) { return prev * (n + k - 1) / k * (1.0 - p); },
                                   cut);
    const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
    std::vector<CountAtom> atoms;
    for (std::size_t k = 0; k < pmf.size(); ++k) atoms.push_back({{static_cast<int>(k)}, pmf[k] / total});
    const double radius = 1.0 / (1.0 - p);
    return GroupSizeModel(1, std::move(atoms), "neg-binomial", cut,
                          [radius](std::span<const double> z) { return z[0] < radius; });
}

GroupSizeModel GroupSizeModel::shifted_negative_binomial(double n, double p) {
    require(n >= 1.0 && n == std::floor(n), "shifted-neg-binomial: n must be a positive integer");
    auto base = negative_binomial(n, p);
    std::vector<CountAtom> atoms = base.atoms();
    const int shift = static_cast<int>(n);
    for (auto& a : atoms) a.counts[0] += shift;
    const double radius = 1.0 / (1.0 - p);
    return GroupSizeModel(1, std::move(atoms), "shifted-neg-binomial",
                          base.truncation().value_or(0) + shift,
                          [radius](std::span<const double> z) { return z[0] < radius; });
}

GroupSizeModel GroupSizeModel::negative_multinomial(double n, std::vector<double> p) {
    require(!p.empty(), "neg-multinomial: need at least one type");
    require(n > 0.0 && std::isfinite(n), "neg-multinomial: n must be positive");
    for (double ps : p) require(valid_probability(ps), "neg-multinomial: each p_s must lie in (0,1)");
    const double sum_p = std::accumulate(p.begin(), p.end(), 0.0);
    require(sum_p < 1.0, "neg-multinomial: p_1 + ... + p_d must be below 1");
    const double p_stop = 1.0 - sum_p;

    // Total count is neg-binomial(n, p_stop); given the total, the split is multinomial.
    int cut = 0;
    const auto total_pmf = truncated_pmf(
        std::pow(p_stop, n), [&](int k, double prev) { return prev * (n + k - 1) / k * sum_p; }, cut);
    const double norm = std::accumulate(total_pmf.begin(), total_pmf.end(), 0.0);

    const std::size_t d = p.size();
    std::vector<double> share(d);
    for (std::size_t s = 0; s < d; ++s) share[s] = p[s] / sum_p;
    std::vector<CountAtom> atoms;
    std::vector<int> current(d, 0);
    for (int total = 0; total <= cut; ++total) {
        compositions(total, d, current, 0, [&](const std::vector<int>& c) {
            double logw = std::lgamma(total + 1.0);
            for (std::size_t s = 0; s < d; ++s) logw += c[s] * std::log(share[s]) - std::lgamma(c[s] + 1.0);
            atoms.push_back({c, total_pmf[static_cast<std::size_t>(total)] / norm * std::exp(logw)});
        });
    }
    return GroupSizeModel(d, std::move(atoms), "neg-multinomial", cut, [p](std::span<const double> z) {
        double acc = 0.0;
        for (std::size_t s = 0; s < p.size(); ++s) acc += p[s] * z[s];
        return acc < 1.0;
    });
}

GroupSizeModel GroupSizeModel::common_shock(const std::array<double, 7>& rates) {
    for (double r : rates) require(r >= 0.0 && std::isfinite(r), "common-shock: rates must be >= 0");
    const double total = std::accumulate(rates.begin(), rates.end(), 0.0);
    require(total > 0.0, "common-shock: at least one rate must be positive");
    static const std::array<std::vector<int>, 7> patterns{{
        {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}}};
    std::vector<CountAtom> atoms;
    for (std::size_t i = 0; i < rates.size(); ++i) atoms.push_back({patterns[i], rates[i] / total});
    return GroupSizeModel(3, std::move(atoms), "common-shock");
}

GroupSizeModel GroupSizeModel::binary_lines(std::vector<double> probs) {
    const std::size_t n = probs.size();
    require(n >= 2 && (n & (n - 1)) == 0, "binary lines: need 2^d probabilities");
    std::size_t d = 0;
    while ((std::size_t{1} << d) < n) ++d;
    std::vector<CountAtom> atoms;
    for (std::size_t mask = 0; mask < n; ++mask) {
        std::vector<int> counts(d);
        for (std::size_t s = 0; s < d; ++s) counts[s] = static_cast<int>((mask >> s) & 1u);
        atoms.push_back({std::move(counts), probs[mask]});
    }
    return GroupSizeModel(d, std::move(atoms), "wang-lines");
}

double GroupSizeModel::p0() const { return empty_mass(atoms_); }

double GroupSizeModel::pmf(const std::vector<int>& counts) const {
    const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), counts,
                                     [](const CountAtom& a, const std::vector<int>& c) { return a.counts < c; });
    return (it != atoms_.end() && it->counts == counts) ? it->prob : 0.0;
}

double GroupSizeModel::total_mass() const {
    double acc = 0.0;
    for (const auto& a : atoms_) acc += a.prob;
    return acc;
}

bool GroupSizeModel::pgf_converges(std::span<const double> z) const {
    if (z.size() != dim_) throw InvalidParams("pgf: argument has the wrong dimension");
    return !domain_ || domain_(z);
}

double GroupSizeModel::pgf(std::span<const double> z) const {
    if (!pgf_converges(z)) throw DivergentTransform("pgf of " + family_ + " diverges at the requested point");
    double acc = 0.0;
    for (const auto& a : atoms_) {
        double term = a.prob;
        for (std::size_t s = 0; s < dim_; ++s)
            if (a.counts[s] != 0) term *= std::pow(z[s], a.counts[s]);
        acc += term;
    }
    return acc;
}

double GroupSizeModel::mean(std::size_t s) const { return marginal_mean(atoms_, s); }

double GroupSizeModel::variance(std::size_t s) const { return marginal_variance(atoms_, s); }

std::pair<int, int> GroupSizeModel::support(std::size_t s) const {
    int lo = std::numeric_limits<int>::max();
    int hi = 0;
    for (const auto& a : atoms_) {
        lo = std::min(lo, a.counts.at(s));
        hi = std::max(hi, a.counts.at(s));
    }
    return {lo, hi};
}

GroupSizeModel GroupSizeModel::with_family(std::string family) const {
    GroupSizeModel out = *this;
    out.family_ = std::move(family);
    return out;
}

GroupSizeModel condition_nonempty(const GroupSizeModel& g) {
    if (g.p0() == 0.0) return g;
    return GroupSizeModel(g.dim(), condition_atoms(g.atoms()), g.family(), g.truncation(), g.pgf_domain());
}

double ArrivalSpec::total() const { return std::accumulate(intensities.begin(), intensities.end(), 0.0); }

void ArrivalSpec::validate() const {
    require(!intensities.empty(), "arrivals: no intensities given");
    if (mode == Mode::single_stream) require(intensities.size() == 1, "arrivals: single stream takes one intensity");
    for (double r : intensities) require(r > 0.0 && std::isfinite(r), "arrivals: intensities must be positive");
}

MergedStreams merge_streams(std::span<const double> intensities, const std::vector<GroupSizeModel>& per_type) {
    const std::size_t d = per_type.size();
    require(d >= 1, "merge_streams: need at least one stream");
    require(intensities.size() == d, "merge_streams: one intensity per stream");
    double total = 0.0;
    for (double r : intensities) {
        require(r > 0.0 && std::isfinite(r), "merge_streams: intensities must be positive");
        total += r;
    }

    std::vector<CountAtom> atoms;
    std::vector<GroupSizeModel::Domain> domains(d);
    for (std::size_t s = 0; s < d; ++s) {
        require(per_type[s].dim() == 1, "merge_streams: per-stream laws must be univariate");
        const double w = intensities[s] / total;
        for (const auto& a : per_type[s].atoms()) {
            std::vector<int> counts(d, 0);
            counts[s] = a.counts[0];
            atoms.push_back({std::move(counts), w * a.prob});
        }
        domains[s] = per_type[s].pgf_domain();
    }
    std::optional<int> cut;
    for (const auto& g : per_type)
        if (g.truncation()) cut = std::max(cut.value_or(0), *g.truncation());

    GroupSizeModel::Domain domain;
    if (std::any_of(domains.begin(), domains.end(), [](const auto& f) { return static_cast<bool>(f); })) {
        domain = [domains](std::span<const double> z) {
            for (std::size_t s = 0; s < domains.size(); ++s) {
                if (domains[s] && !domains[s](z.subspan(s, 1))) return false;
            }
            return true;
        };
    }
    GroupSizeModel merged(d, std::move(atoms), "merged-streams", cut, domain);
    const auto thinned = thin_empty(total, merged);
    return {total, merged, thinned.lambda, thinned.groups};
}

ThinnedStream thin_empty(double lambda_tilde, const GroupSizeModel& g) {
    require(lambda_tilde > 0.0 && std::isfinite(lambda_tilde), "thin_empty: intensity must be positive");
    return {lambda_tilde * (1.0 - g.p0()), condition_nonempty(g)};
}

}  // namespace ruin
