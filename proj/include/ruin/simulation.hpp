#ifndef RUIN_SIMULATION_HPP
#define RUIN_SIMULATION_HPP

#include "ruin/reduction.hpp"
#include "ruin/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ruin {

/// Replication r draws from CounterRng(seed, r * stream_stride).
struct SimulationConfig {
    std::uint64_t replications = 100'000;
    double horizon = 1e4;
    std::uint64_t seed = 20170823;
    std::uint64_t stream_stride = 1;

    void validate() const;
};

struct EstimateWithCI {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::uint64_t replications = 0;
};

/// Binomial proportion with its standard error.
EstimateWithCI proportion(std::uint64_t hits, std::uint64_t n);

/// One group arrival on a simulated path.
struct PathEvent {
    double time;
    std::vector<int> counts;
    double claim;           // total claim of the group
    double surplus_after;
};

struct PathOutcome {
    bool ruined = false;
    bool escaped = false;    // surplus reached the escape level
    bool truncated = false;  // horizon hit with neither ruin nor escape
    double ruin_time = 0.0;
    double deficit = 0.0;         // -R(tau+)
    double surplus_before = 0.0;  // R(tau-)
    double ruin_claim = 0.0;      // group total that caused ruin
};

/// Precomputed samplers for the group and claim laws of a spec.
class PathSimulator {
public:
    /// escape_level: surplus above which a path is counted as safe; by
    /// default u + ln(1e4 (1 + rho)) / eps when the Lundberg exponent exists.
    explicit PathSimulator(const RiskModelSpec& spec);

    const RiskModelSpec& spec() const noexcept { return spec_; }
    std::optional<double> epsilon() const noexcept { return eps_; }
    double escape_level(double u) const;

    PathOutcome run(double u, double horizon, CounterRng& rng, std::vector<PathEvent>* log = nullptr) const;

    /// Per-type claim counts in (0, t].
    std::vector<int> counts_until(double t, CounterRng& rng) const;

private:
    struct CountSampler {
        std::vector<double> cumulative;
        std::vector<std::vector<int>> counts;
        const std::vector<int>& draw(CounterRng& rng) const;
    };

    std::vector<int> draw_counts(std::size_t stream, CounterRng& rng) const;

    RiskModelSpec spec_;
    std::vector<CountSampler> samplers_;  // one per stream
    std::optional<double> eps_;
    double escape_offset_ = 0.0;
};

/// simulate_path: one replication of the surplus process, optionally logging events.
PathOutcome simulate_path(const RiskModelSpec& spec, double u, const SimulationConfig& cfg, CounterRng& rng,
                          std::vector<PathEvent>* log = nullptr);

struct PathPsiEstimate {
    EstimateWithCI psi;
    double truncated_fraction;
};

/// Ruin frequency of simulated paths started at u.
PathPsiEstimate estimate_psi_path(const RiskModelSpec& spec, double u, const SimulationConfig& cfg);

/// Compound-geometric ladder estimator: M ~ Geometric(delta(0)), M draws from
/// F_I by inverse cdf on fi_grid, fraction of sums above u.
EstimateWithCI estimate_psi_ladder(const ReducedClModel& m, double c, double u, const SimulationConfig& cfg);
/// Same replications scored at every u.
std::vector<EstimateWithCI> estimate_psi_ladder(const ReducedClModel& m, double c, std::span<const double> u,
                                                const SimulationConfig& cfg);

/// Inverse of fi_grid with an exponential tail past the last node.
double sample_fi(const GriddedDistribution& fi, double p);

struct RuinTimeEstimate {
    EstimateWithCI mean;  // replications = number of ruined paths
    std::uint64_t ruined;
    double truncated_fraction;
};

/// Mean ruin time among ruined paths. Throws NoRuinObserved.
RuinTimeEstimate estimate_ruin_time(const RiskModelSpec& spec, const SimulationConfig& cfg, double u);

struct DeficitSample {
    std::vector<double> deficit;
    std::vector<double> surplus_before;
    std::vector<double> ruin_claim;
    std::uint64_t replications;
    double ks_distance;     // sup |empirical - F_I|
    double ks_critical_1pct;
    EstimateWithCI ruin_claim_mean;

    /// Empirical P(deficit > x, surplus before ruin > y | ruin).
    EstimateWithCI joint_survival(double x, double y) const;
};

/// Deficits at ruin of paths started at 0, compared with fi_grid. Throws NoRuinObserved.
DeficitSample empirical_deficit(const RiskModelSpec& spec, const GriddedDistribution& fi, const SimulationConfig& cfg);

/// Per-type sample means of the claim counts at time t.
std::vector<EstimateWithCI> simulate_counts(const RiskModelSpec& spec, double t, const SimulationConfig& cfg);

}  // namespace ruin

#endif  // RUIN_SIMULATION_HPP
