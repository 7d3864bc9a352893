#ifndef RUIN_DISTRIBUTIONS_HPP
#define RUIN_DISTRIBUTIONS_HPP

#include "ruin/lattice.hpp"
#include "ruin/rng.hpp"

#include <string>
#include <variant>

namespace ruin {

struct Exponential {
    double rate;
};

struct Erlang {
    int shape;
    double rate;
};

/// Support [scale, inf), survival (scale/x)^alpha.
struct Pareto {
    double alpha;
    double scale;
};

struct Lognormal {
    double mu;
    double sigma;
};

struct Weibull {
    double shape;
    double scale;
};

struct Uniform {
    double a;
    double b;
};

/// A lattice cdf used as a claim law (numeric carrier only).
struct EmpiricalLattice {
    GriddedDistribution grid;
};

using ClaimFamily = std::variant<Exponential, Erlang, Pareto, Lognormal, Weibull, Uniform, EmpiricalLattice>;

/// Absolute tolerance of the adaptive quadrature behind transforms without a closed form.
inline constexpr double kQuadratureTolerance = 1e-10;

/// Positive claim-size law. Immutable; safe to share across threads.
class ClaimDistribution {
public:
    explicit ClaimDistribution(ClaimFamily family);

    static ClaimDistribution exponential(double rate) { return ClaimDistribution(Exponential{rate}); }
    static ClaimDistribution erlang(int shape, double rate) { return ClaimDistribution(Erlang{shape, rate}); }
    static ClaimDistribution pareto(double alpha, double scale) { return ClaimDistribution(Pareto{alpha, scale}); }
    static ClaimDistribution lognormal(double mu, double sigma) { return ClaimDistribution(Lognormal{mu, sigma}); }
    static ClaimDistribution weibull(double shape, double scale) { return ClaimDistribution(Weibull{shape, scale}); }
    static ClaimDistribution uniform(double a, double b) { return ClaimDistribution(Uniform{a, b}); }
    static ClaimDistribution empirical(GriddedDistribution grid) {
        return ClaimDistribution(EmpiricalLattice{std::move(grid)});
    }

    const ClaimFamily& family() const noexcept { return family_; }
    std::string name() const;
    std::string describe() const;

    double cdf(double x) const;
    double survival(double x) const;
    double pdf(double x) const;
    double quantile(double p) const;

    /// +inf when the moment does not exist.
    double mean() const;
    double second_moment() const;
    double variance() const;

    /// Pareto, lognormal and Weibull with shape < 1.
    bool heavy_tailed() const;

    /// The transform E exp(-sY) is finite for s > abscissa (and always for s >= 0).
    /// -inf for laws with an entire moment generating function.
    double lst_abscissa() const;
    bool lst_defined(double s) const;

    /// E exp(-sY). Closed form where available, otherwise adaptive quadrature of
    /// 1 - s * int exp(-sx) survival(x) dx. Throws DivergentTransform below the abscissa.
    double lst(double s) const;

    /// One draw; inverse cdf where closed, sum of exponentials for Erlang,
    /// lattice inversion for the empirical carrier.
    double sample(CounterRng& rng) const;

private:
    ClaimFamily family_;
};

/// Lattice tabulation of F^{n*} by repeated midpoint-lattice convolution
/// (binary powering). n = 0 gives the unit step at zero.
/// Throws GridTooCoarse when the residual tail mass exceeds kGridTooCoarseThreshold.
GriddedDistribution convolve_power(const ClaimDistribution& d, int n, double step, std::size_t points);

/// n-th convolution power on the half lattice, truncated to the given node count.
LatticeMasses convolution_power_masses(const LatticeMasses& base, int n, std::size_t points);

/// Integrated-tail cdf F_I(x) = (1/EY) int_0^x (1 - F(y)) dy on the lattice,
/// normalized by the exact mean. Throws InfiniteMean when EY = inf.
GriddedDistribution integrated_tail(const ClaimDistribution& d, double step, std::size_t points);

/// Default lattice for a law: step 0.01 * mean, enough points to cover
/// mean + 40 standard deviations (a long fixed multiple of the mean when the
/// variance is infinite).
struct LatticeShape {
    double step;
    std::size_t points;
};
LatticeShape default_lattice(double mean, double variance);

}  // namespace ruin

#endif  // RUIN_DISTRIBUTIONS_HPP
