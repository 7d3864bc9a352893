#include "ruin/reduction.hpp"

#include "ruin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace ruin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxPoints = std::size_t{1} << 22;
constexpr double kHeavyCoverMeans = 1000.0;

struct FullGroupLaw {
    double lambda_tilde;
    GroupSizeModel groups;
};

FullGroupLaw full_group_law(const RiskModelSpec& spec) {
    spec.validate();
    if (spec.arrivals.mode == ArrivalSpec::Mode::independent_streams) {
        auto merged = merge_streams(spec.arrivals.intensities, spec.groups);
        return {merged.lambda_tilde, std::move(merged.merged)};
    }
    return {spec.arrivals.intensities[0], spec.groups[0]};
}

bool type_appears(const GroupSizeModel& g, std::size_t s) { return g.support(s).second > 0; }

// Per-type convolution powers with the binary squares cached.
class PowerCache {
public:
    PowerCache(const std::vector<ClaimDistribution>& claims, double step, std::size_t points)
        : claims_(claims), step_(step), points_(points), squares_(claims.size()), powers_(claims.size()) {}

    const LatticeMasses& power(std::size_t s, int k) {
        auto it = powers_[s].find(k);
        if (it != powers_[s].end()) return it->second;
        const std::size_t len = half_length(points_);
        std::optional<LatticeMasses> acc;
        int bit = 0;
        for (unsigned rest = static_cast<unsigned>(k); rest > 0; rest >>= 1, ++bit) {
            if ((rest & 1u) == 0) continue;
            const auto& sq = square(s, bit);
            acc = acc ? convolve(*acc, sq, len) : sq;
        }
        return powers_[s].emplace(k, std::move(*acc)).first->second;
    }

private:
    const LatticeMasses& square(std::size_t s, int bit) {
        auto& sq = squares_[s];
        if (sq.empty()) {
            const auto& d = claims_[s];
            sq.push_back(discretize_cdf([&](double x) { return d.cdf(x); }, step_, points_));
        }
        while (static_cast<int>(sq.size()) <= bit) sq.push_back(convolve(sq.back(), sq.back(), half_length(points_)));
        return sq[static_cast<std::size_t>(bit)];
    }

    const std::vector<ClaimDistribution>& claims_;
    double step_;
    std::size_t points_;
    std::vector<std::vector<LatticeMasses>> squares_;
    std::vector<std::map<int, LatticeMasses>> powers_;
};

// Atoms are sorted lexicographically, so atoms sharing a count prefix are
// contiguous and share the partial convolution of that prefix.
void assemble(const std::vector<CountAtom>& atoms, std::size_t begin, std::size_t end, std::size_t type,
              const LatticeMasses* prefix, PowerCache& cache, std::size_t len, LatticeMasses& out) {
    const std::size_t d = atoms[begin].counts.size();
    std::size_t i = begin;
    while (i < end) {
        const int k = atoms[i].counts[type];
        std::size_t j = i;
        while (j < end && atoms[j].counts[type] == k) ++j;

        std::optional<LatticeMasses> owned;
        const LatticeMasses* next = prefix;
        if (k > 0) {
            const auto& p = cache.power(type, k);
            if (prefix) {
                owned = convolve(*prefix, p, len);
                next = &*owned;
            } else {
                next = &p;
            }
        }
        if (type + 1 == d) {
            double weight = 0.0;
            for (std::size_t a = i; a < j; ++a) weight += atoms[a].prob;
            if (next) {
                axpy(weight, *next, out);
            } else {
                out.mass[0] += weight;  // empty group: unit mass at zero
            }
        } else {
            assemble(atoms, i, j, type + 1, next, cache, len, out);
        }
        i = j;
    }
}

}  // namespace

void RiskModelSpec::validate() const {
    arrivals.validate();
    if (claims.empty()) throw InvalidParams("model: at least one claim type is required");
    if (!(premium_rate > 0.0) || !std::isfinite(premium_rate)) throw InvalidParams("model: premium rate must be positive");
    if (!(initial_capital >= 0.0) || !std::isfinite(initial_capital)) {
        throw InvalidParams("model: initial capital must be >= 0");
    }
    if (arrivals.mode == ArrivalSpec::Mode::single_stream) {
        if (groups.size() != 1) throw InvalidParams("model: single-stream mode takes one joint group law");
        if (groups[0].dim() != claims.size()) {
            std::ostringstream os;
            os << "model: group law has " << groups[0].dim() << " types but " << claims.size() << " claim laws given";
            throw InvalidParams(os.str());
        }
    } else {
        if (arrivals.intensities.size() != claims.size() || groups.size() != claims.size()) {
            throw InvalidParams("model: independent streams need one intensity, count law and claim law per type");
        }
        for (const auto& g : groups)
            if (g.dim() != 1) throw InvalidParams("model: per-stream count laws must be univariate");
    }
}

double ReducedLaw::y1_variance() const {
    if (!std::isfinite(y1_second_moment)) return kInf;
    return std::max(0.0, y1_second_moment - y1_mean * y1_mean);
}

bool ReducedLaw::heavy_tailed() const {
    for (std::size_t s = 0; s < claims.size(); ++s)
        if (type_appears(groups, s) && claims[s].heavy_tailed()) return true;
    return false;
}

bool ReducedLaw::y1_lst_defined(double s) const {
    std::vector<double> z(claims.size(), 1.0);
    for (std::size_t t = 0; t < claims.size(); ++t) {
        if (!type_appears(groups, t)) continue;
        if (!claims[t].lst_defined(s)) return false;
        z[t] = claims[t].lst(s);
    }
    return groups.pgf_converges(z);
}

double ReducedLaw::y1_lst(double s) const {
    std::vector<double> z(claims.size(), 1.0);
    for (std::size_t t = 0; t < claims.size(); ++t)
        if (type_appears(groups, t)) z[t] = claims[t].lst(s);
    return groups.pgf(z);
}

ReducedLaw reduce_law(const RiskModelSpec& spec, bool thin) {
    auto full = full_group_law(spec);
    const double p0 = full.groups.p0();
    GroupSizeModel groups = thin ? condition_nonempty(full.groups) : full.groups;
    const double lambda = thin ? full.lambda_tilde * (1.0 - p0) : full.lambda_tilde;

    const std::size_t d = spec.dim();
    std::vector<double> m(d), v(d);
    for (std::size_t s = 0; s < d; ++s) {
        if (!type_appears(groups, s)) continue;
        m[s] = spec.claims[s].mean();
        v[s] = spec.claims[s].variance();
        if (!std::isfinite(m[s])) throw InfiniteMean("claims of type " + std::to_string(s + 1) + " have infinite mean");
    }
    // E Y1 = sum_s E U_s m_s; E Y1^2 conditions on the count vector, which keeps
    // the covariances between types.
    double mean = 0.0;
    double second = 0.0;
    for (const auto& a : groups.atoms()) {
        double cond_mean = 0.0;
        double cond_var = 0.0;
        for (std::size_t s = 0; s < d; ++s) {
            if (a.counts[s] == 0) continue;
            cond_mean += a.counts[s] * m[s];
            cond_var += a.counts[s] * v[s];
        }
        mean += a.prob * cond_mean;
        second += a.prob * (cond_var + cond_mean * cond_mean);
    }
    if (!(mean > 0.0)) throw DegenerateModel("model: groups never carry claims");
    return ReducedLaw{full.lambda_tilde, p0, thin, lambda, std::move(groups), spec.claims, mean, second};
}

LatticeShape default_lattice(const ReducedLaw& law) {
    auto shape = default_lattice(law.y1_mean, law.y1_variance());
    if (law.heavy_tailed()) {
        const auto heavy = static_cast<std::size_t>(std::ceil(kHeavyCoverMeans * law.y1_mean / shape.step)) + 1;
        shape.points = std::max(shape.points, heavy);
    }
    return shape;
}

LatticeMasses mixture_masses(const std::vector<CountAtom>& atoms, const std::vector<ClaimDistribution>& claims,
                             double step, std::size_t points) {
    const std::size_t len = half_length(points);
    LatticeMasses out{step, std::vector<double>(len, 0.0)};
    if (atoms.empty()) return out;
    std::vector<CountAtom> sorted = atoms;
    std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.counts < y.counts; });
    PowerCache cache(claims, step, points);
    assemble(sorted, 0, sorted.size(), 0, nullptr, cache, len, out);
    return out;
}

ReducedClModel reduce(const RiskModelSpec& spec, const LatticeOptions& options) {
    auto law = reduce_law(spec, options.thin);
    auto shape = default_lattice(law);
    if (options.step > 0.0) {
        const double cover = shape.step * static_cast<double>(shape.points - 1);
        shape.step = options.step;
        shape.points = static_cast<std::size_t>(std::ceil(cover / shape.step)) + 1;
    }
    if (options.points > 0) shape.points = options.points;
    if (shape.points < 2) throw InvalidParams("reduce: need at least two lattice points");
    shape.points = std::min(shape.points, kMaxPoints);

    auto y1 = to_gridded(mixture_masses(law.groups.atoms(), law.claims, shape.step, shape.points), shape.points);
    if (y1.tail_mass() > kGridTooCoarseThreshold) {
        std::ostringstream os;
        os << "reduce: Y1 leaves mass " << y1.tail_mass() << " beyond x=" << y1.upper()
           << "; enlarge the lattice (points) or the step";
        throw GridTooCoarse(os.str());
    }
    auto fi = integrated_tail_of(y1, law.y1_mean);

    std::optional<GriddedDistribution> fi_source;
    if (options.source_route) {
        const auto full = full_group_law(spec);
        auto source = to_gridded(mixture_masses(full.groups.atoms(), law.claims, shape.step, shape.points),
                                 shape.points);
        const double source_mean = law.thinned ? (1.0 - law.p0) * law.y1_mean : law.y1_mean;
        fi_source = integrated_tail_of(source, source_mean);
    }
    return ReducedClModel{std::move(law), std::move(y1), std::move(fi), std::move(fi_source)};
}

RiskModelSpec thinned_spec(const RiskModelSpec& spec) {
    auto law = reduce_law(spec, true);
    return RiskModelSpec{ArrivalSpec::single(law.lambda), {law.groups}, spec.claims, spec.premium_rate,
                         spec.initial_capital};
}

RiskModelSpec merged_spec(const RiskModelSpec& spec) {
    if (spec.arrivals.mode == ArrivalSpec::Mode::single_stream) return spec;
    auto full = full_group_law(spec);
    return RiskModelSpec{ArrivalSpec::single(full.lambda_tilde), {full.groups}, spec.claims, spec.premium_rate,
                         spec.initial_capital};
}

EquivalenceReport equivalence_report(const RiskModelSpec& a, const RiskModelSpec& b) {
    const auto la = reduce_law(a);
    const auto lb = reduce_law(b);
    EquivalenceReport report;

    const auto exact = [&](std::string name, double x, double y) {
        double delta = std::abs(x - y);
        if (std::isinf(x) && std::isinf(y) && x == y) delta = 0.0;
        const double tol = kExactTolerance * std::max({1.0, std::isfinite(x) ? std::abs(x) : 0.0,
                                                       std::isfinite(y) ? std::abs(y) : 0.0});
        const bool agree = delta <= tol;
        report.rows.push_back({std::move(name), x, y, delta, tol, agree});
        report.equivalent = report.equivalent && agree;
    };
    exact("lambda", la.lambda, lb.lambda);
    exact("y1_mean", la.y1_mean, lb.y1_mean);
    exact("y1_second_moment", la.y1_second_moment, lb.y1_second_moment);
    exact("lambda_times_y1_mean", la.lambda * la.y1_mean, lb.lambda * lb.y1_mean);
    for (double s : {0.1, 0.5, 1.0, 2.0}) {
        std::ostringstream name;
        name << "y1_lst(" << s << ")";
        exact(name.str(), la.y1_lst(s), lb.y1_lst(s));
    }

    // one lattice for both sides: the finer step and the longer cover
    const auto sa = default_lattice(la);
    const auto sb = default_lattice(lb);
    const double step = std::min(sa.step, sb.step);
    const double cover = std::max(sa.step * static_cast<double>(sa.points - 1), sb.step * static_cast<double>(sb.points - 1));
    const LatticeOptions opts{step, std::min(kMaxPoints, static_cast<std::size_t>(std::ceil(cover / step)) + 1)};
    const auto ma = reduce(a, opts);
    const auto mb = reduce(b, opts);
    const auto sup_row = [&](std::string name, const GriddedDistribution& x, const GriddedDistribution& y) {
        double worst = 0.0;
        std::size_t at = 0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double dlt = std::abs(x.values()[k] - y.values()[k]);
            if (dlt > worst) {
                worst = dlt;
                at = k;
            }
        }
        const bool agree = worst <= kLatticeTolerance;
        report.rows.push_back({std::move(name), x.values()[at], y.values()[at], worst, kLatticeTolerance, agree});
        report.equivalent = report.equivalent && agree;
    };
    sup_row("y1_grid_sup", ma.y1_grid, mb.y1_grid);
    sup_row("fi_grid_sup", ma.fi_grid, mb.fi_grid);
    return report;
}

}  // namespace ruin
