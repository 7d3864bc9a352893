#ifndef RUIN_RUIN_ANALYTICS_HPP
#define RUIN_RUIN_ANALYTICS_HPP

#include "ruin/reduction.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ruin {

enum class Method { closed_form, lattice, monte_carlo, root_find };

std::string to_string(Method m);

template <class T>
struct Flagged {
    T value;
    Method method;
};

struct SafetyLoading {
    double rho;
    bool net_profit;  // c > lambda E Y1
};

/// rho = c / (lambda E Y1) - 1.
SafetyLoading safety_loading(const ReducedLaw& m, double c);

struct RuinAtZero {
    double psi0;
    double delta0;
};

/// psi(0) = lambda E Y1 / c. Throws NetProfitViolated.
RuinAtZero ruin_at_zero(const ReducedLaw& m, double c);

/// E(tau(0) | tau(0) < inf) = (D Y1 + (E Y1)^2) / (2 E Y1 (c - lambda E Y1)).
/// Throws NetProfitViolated or InfiniteVariance.
double expected_ruin_time_zero(const ReducedLaw& m, double c);

/// h(eps) = l_{Y1}(-eps) - 1 - (c / lambda) eps.
double lundberg_function(const ReducedLaw& m, double c, double eps);

/// Positive root of h, or nullopt when none exists where the transform
/// converges. Throws NetProfitViolated.
std::optional<double> lundberg_exponent(const ReducedLaw& m, double c);

/// Premium rate c for which the Lundberg exponent equals -ln(alpha) / u, so
/// that the bound exp(-eps u) equals alpha. Throws DivergentTransform when
/// l_{Y1} does not exist at the target exponent.
double calibrate_premium(const ReducedLaw& m, double alpha, double u);

/// Rate mu when Y1 is exponential (every group carries exactly one claim and
/// those claims are all Exponential(mu)).
std::optional<double> exponential_rate(const ReducedLaw& m);

struct ExponentialClosedForm {
    double rho;
    double psi0;
    double epsilon;
    double psi;
    double delta;
    double expected_ruin_time;  // E(tau(u) | tau(u) < inf)
};

/// Exponential(mu) claims, Poisson(lambda) arrivals, premium c, capital u.
/// Throws NetProfitViolated.
ExponentialClosedForm exponential_closed_form(double mu, double lambda, double c, double u);

/// A function of u tabulated at the lattice nodes of the model.
struct LatticeCurve {
    double step;
    std::vector<double> values;

    double upper() const { return step * static_cast<double>(values.size() - 1); }
    /// Linear interpolation. Throws GridTooCoarse beyond the last node.
    double at(double u) const;
    std::vector<double> sample(std::span<const double> u_grid) const;
};

struct PsiCurve : LatticeCurve {
    double psi0;
    int terms_needed;         // smallest N with psi0^(N+1) / (1 - psi0) < tol
    int terms_used;           // power of two M > N actually summed
    double truncation_error;  // certified bound on the omitted tail, psi0^M
};

/// Pollaczek-Khinchin series on the lattice of fi_grid. The omitted tail
/// beyond M terms is replaced by its lower bound psi0^M (1 - F_I^{M*}(u)),
/// which keeps psi(0) exact. Throws NetProfitViolated.
PsiCurve psi_pollaczek_khinchin(const ReducedClModel& m, double c, double tol = 1e-6);
std::vector<double> psi_pollaczek_khinchin(const ReducedClModel& m, double c, std::span<const double> u_grid,
                                           double tol = 1e-6);

/// Survival probability from the defective renewal equation, trapezoid rule
/// with the diagonal term implicit, on lattice nodes up to u_max.
LatticeCurve delta_renewal_solve(const ReducedClModel& m, double c, double u_max);
std::vector<double> delta_renewal_solve(const ReducedClModel& m, double c, std::span<const double> u_grid);

/// G(u, y) = P(deficit <= y, ruin | capital u); g[i][j] = G(u[i], y[j]).
struct GerberShiuGrid {
    std::vector<double> u;
    std::vector<double> y;
    std::vector<std::vector<double>> g;
};

/// Trapezoidal Volterra marching in u on the lattice, all y at once.
GerberShiuGrid gerber_shiu_solve(const ReducedClModel& m, double c, std::span<const double> u_grid,
                                 std::span<const double> y_grid);

struct DeficitLaws {
    GriddedDistribution deficit;              // F_I
    double mean_deficit;                      // E Y1^2 / (2 E Y1); inf when E Y1^2 = inf
    GriddedDistribution claim_causing_ruin;   // (1 / E Y1) int_0^x y dF_{Y1}(y)
    double claim_causing_ruin_mean;           // E Y1^2 / E Y1
    std::optional<std::string> claim_causing_ruin_issue;

    /// P(deficit > x, surplus before ruin > y | ruin from 0) = 1 - F_I(x + y).
    double joint_survival(double x, double y) const { return 1.0 - deficit.cdf(x + y); }
};

DeficitLaws deficit_laws_at_zero(const ReducedClModel& m);

/// C with psi(u) ~ C exp(-eps u), or nullopt when eps is absent or the
/// integral of x e^{eps x} dF_I does not settle on the lattice.
std::optional<double> cl_approximation(const ReducedClModel& m, double c, std::optional<double> eps);

struct HeavyTailRatio {
    std::vector<double> u;
    std::vector<double> ratio;  // psi(u) / (1 - F_I(u))
    double limit;               // 1 / rho
    bool applicable;            // claims flagged heavy tailed
    double reliable_u;          // largest lattice u where psi is trusted
};

/// Ratio psi / F_I-bar on u_grid (points beyond reliable_u are dropped).
HeavyTailRatio heavy_tail_asymptotic(const ReducedClModel& m, double c, const PsiCurve& psi,
                                     std::span<const double> u_grid);
/// Same, with the series evaluated to 1e-12 and a log-spaced grid up to reliable_u.
HeavyTailRatio heavy_tail_asymptotic(const ReducedClModel& m, double c);

/// Scalar ruin characteristics with their method flags plus the psi curve.
struct RuinReport {
    Flagged<double> rho;
    Flagged<double> psi0;
    Flagged<double> delta0;
    std::optional<Flagged<double>> expected_ruin_time_u0;
    std::optional<Flagged<double>> lundberg_epsilon;
    std::optional<Flagged<double>> cl_constant;
    PsiCurve psi;
};

RuinReport analyze(const ReducedClModel& m, double c, double tol = 1e-6);

}  // namespace ruin

#endif  // RUIN_RUIN_ANALYTICS_HPP
