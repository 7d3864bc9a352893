#include "ruin/distributions.hpp"

#include "ruin/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ruin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// int_a^inf f, adaptive Gauss-Kronrod on the mapped half line.
template <class F>
double integrate_half_line(F f, double a) {
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, kInf, 20, 1e-13, &error);
    return value;
}

double lognormal_survival(double x, double mu, double sigma) {
    if (x <= 0.0) return 1.0;
    return 0.5 * std::erfc((std::log(x) - mu) / (sigma * std::numbers::sqrt2));
}

double normal_quantile(double p) {
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

void check_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidParams(std::string("claim distribution: ") + what + " must be positive and finite");
    }
}

}  // namespace

ClaimDistribution::ClaimDistribution(ClaimFamily family) : family_(std::move(family)) {
    std::visit(Overloaded{
                   [](const Exponential& f) { check_positive(f.rate, "exponential rate"); },
                   [](const Erlang& f) {
                       if (f.shape < 1) throw InvalidParams("claim distribution: Erlang shape must be >= 1");
                       check_positive(f.rate, "Erlang rate");
                   },
                   [](const Pareto& f) {
                       check_positive(f.alpha, "Pareto alpha");
                       check_positive(f.scale, "Pareto scale");
                   },
                   [](const Lognormal& f) {
                       if (!std::isfinite(f.mu)) throw InvalidParams("claim distribution: lognormal mu must be finite");
                       check_positive(f.sigma, "lognormal sigma");
                   },
                   [](const Weibull& f) {
                       check_positive(f.shape, "Weibull shape");
                       check_positive(f.scale, "Weibull scale");
                   },
                   [](const Uniform& f) {
                       if (!(f.a >= 0.0) || !(f.b > f.a) || !std::isfinite(f.b)) {
                           throw InvalidParams("claim distribution: uniform needs 0 <= a < b");
                       }
                   },
                   [](const EmpiricalLattice& f) {
                       f.grid.validate(1e-9);
                       if (f.grid.values().front() > 0.0) {
                           throw InvalidParams("claim distribution: empirical lattice puts mass at zero");
                       }
                   },
               },
               family_);
}

std::string ClaimDistribution::name() const {
    return std::visit(Overloaded{
                          [](const Exponential&) { return std::string("exponential"); },
                          [](const Erlang&) { return std::string("erlang"); },
                          [](const Pareto&) { return std::string("pareto"); },
                          [](const Lognormal&) { return std::string("lognormal"); },
                          [](const Weibull&) { return std::string("weibull"); },
                          [](const Uniform&) { return std::string("uniform"); },
                          [](const EmpiricalLattice&) { return std::string("empirical-lattice"); },
                      },
                      family_);
}

std::string ClaimDistribution::describe() const {
    std::ostringstream os;
    os << name() << '(';
    std::visit(Overloaded{
                   [&](const Exponential& f) { os << "rate=" << f.rate; },
                   [&](const Erlang& f) { os << "shape=" << f.shape << ", rate=" << f.rate; },
                   [&](const Pareto& f) { os << "alpha=" << f.alpha << ", scale=" << f.scale; },
                   [&](const Lognormal& f) { os << "mu=" << f.mu << ", sigma=" << f.sigma; },
                   [&](const Weibull& f) { os << "shape=" << f.shape << ", scale=" << f.scale; },
                   [&](const Uniform& f) { os << "a=" << f.a << ", b=" << f.b; },
                   [&](const EmpiricalLattice& f) { os << "step=" << f.grid.step() << ", points=" << f.grid.size(); },
               },
               family_);
    os << ')';
    return os.str();
}

double ClaimDistribution::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    return std::visit(Overloaded{
                          [&](const Exponential& f) { return -std::expm1(-f.rate * x); },
                          [&](const Erlang& f) { return boost::math::gamma_p(static_cast<double>(f.shape), f.rate * x); },
                          [&](const Pareto& f) { return x <= f.scale ? 0.0 : 1.0 - std::pow(f.scale / x, f.alpha); },
                          [&](const Lognormal& f) { return 1.0 - lognormal_survival(x, f.mu, f.sigma); },
                          [&](const Weibull& f) { return -std::expm1(-std::pow(x / f.scale, f.shape)); },
                          [&](const Uniform& f) { return std::clamp((x - f.a) / (f.b - f.a), 0.0, 1.0); },
                          [&](const EmpiricalLattice& f) { return f.grid.cdf(x); },
                      },
                      family_);
}

double ClaimDistribution::survival(double x) const {
    if (x <= 0.0) return 1.0;
    return std::visit(Overloaded{
                          [&](const Exponential& f) { return std::exp(-f.rate * x); },
                          [&](const Erlang& f) { return boost::math::gamma_q(static_cast<double>(f.shape), f.rate * x); },
                          [&](const Pareto& f) { return x <= f.scale ? 1.0 : std::pow(f.scale / x, f.alpha); },
                          [&](const Lognormal& f) { return lognormal_survival(x, f.mu, f.sigma); },
                          [&](const Weibull& f) { return std::exp(-std::pow(x / f.scale, f.shape)); },
                          [&](const Uniform& f) { return std::clamp((f.b - x) / (f.b - f.a), 0.0, 1.0); },
                          [&](const EmpiricalLattice& f) { return f.grid.survival(x); },
                      },
                      family_);
}

double ClaimDistribution::pdf(double x) const {
    if (x < 0.0) return 0.0;
    return std::visit(
        Overloaded{
            [&](const Exponential& f) { return f.rate * std::exp(-f.rate * x); },
            [&](const Erlang& f) {
                return boost::math::gamma_p_derivative(static_cast<double>(f.shape), f.rate * x) * f.rate;
            },
            [&](const Pareto& f) { return x < f.scale ? 0.0 : f.alpha / f.scale * std::pow(f.scale / x, f.alpha + 1.0); },
            [&](const Lognormal& f) {
                if (x == 0.0) return 0.0;
                const double z = (std::log(x) - f.mu) / f.sigma;
                return std::exp(-0.5 * z * z) / (x * f.sigma * std::sqrt(2.0 * std::numbers::pi));
            },
            [&](const Weibull& f) {
                const double t = x / f.scale;
                return f.shape / f.scale * std::pow(t, f.shape - 1.0) * std::exp(-std::pow(t, f.shape));
            },
            [&](const Uniform& f) { return (x >= f.a && x <= f.b) ? 1.0 / (f.b - f.a) : 0.0; },
            [&](const EmpiricalLattice& f) {
                const auto& g = f.grid;
                const auto k = static_cast<std::size_t>(x / g.step());
                if (k + 1 >= g.size()) return 0.0;
                return (g.values()[k + 1] - g.values()[k]) / g.step();
            },
        },
        family_);
}

double ClaimDistribution::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
        if (p <= 0.0) return 0.0;
        throw InvalidParams("quantile: p must lie in (0,1)");
    }
    return std::visit(Overloaded{
                          [&](const Exponential& f) { return -std::log1p(-p) / f.rate; },
                          [&](const Erlang& f) {
                              return boost::math::gamma_p_inv(static_cast<double>(f.shape), p) / f.rate;
                          },
                          [&](const Pareto& f) { return f.scale * std::pow(1.0 - p, -1.0 / f.alpha); },
                          [&](const Lognormal& f) { return std::exp(f.mu + f.sigma * normal_quantile(p)); },
                          [&](const Weibull& f) { return f.scale * std::pow(-std::log1p(-p), 1.0 / f.shape); },
                          [&](const Uniform& f) { return f.a + (f.b - f.a) * p; },
                          [&](const EmpiricalLattice& f) { return f.grid.quantile(p); },
                      },
                      family_);
}

double ClaimDistribution::mean() const {
    return std::visit(Overloaded{
                          [](const Exponential& f) { return 1.0 / f.rate; },
                          [](const Erlang& f) { return f.shape / f.rate; },
                          [](const Pareto& f) { return f.alpha > 1.0 ? f.alpha * f.scale / (f.alpha - 1.0) : kInf; },
                          [](const Lognormal& f) { return std::exp(f.mu + 0.5 * f.sigma * f.sigma); },
                          [](const Weibull& f) { return f.scale * std::tgamma(1.0 + 1.0 / f.shape); },
                          [](const Uniform& f) { return 0.5 * (f.a + f.b); },
                          [](const EmpiricalLattice& f) { return f.grid.mean(); },
                      },
                      family_);
}

double ClaimDistribution::second_moment() const {
    return std::visit(
        Overloaded{
            [](const Exponential& f) { return 2.0 / (f.rate * f.rate); },
            [](const Erlang& f) { return f.shape * (f.shape + 1.0) / (f.rate * f.rate); },
            [](const Pareto& f) { return f.alpha > 2.0 ? f.alpha * f.scale * f.scale / (f.alpha - 2.0) : kInf; },
            [](const Lognormal& f) { return std::exp(2.0 * f.mu + 2.0 * f.sigma * f.sigma); },
            [](const Weibull& f) { return f.scale * f.scale * std::tgamma(1.0 + 2.0 / f.shape); },
            [](const Uniform& f) { return (f.a * f.a + f.a * f.b + f.b * f.b) / 3.0; },
            [](const EmpiricalLattice& f) { return f.grid.second_moment(); },
        },
        family_);
}

double ClaimDistribution::variance() const {
    const double m2 = second_moment();
    if (!std::isfinite(m2)) return kInf;
    const double m = mean();
    return std::max(0.0, m2 - m * m);
}

bool ClaimDistribution::heavy_tailed() const {
    return std::visit(Overloaded{
                          [](const Pareto&) { return true; },
                          [](const Lognormal&) { return true; },
                          [](const Weibull& f) { return f.shape < 1.0; },
                          [](const auto&) { return false; },
                      },
                      family_);
}

double ClaimDistribution::lst_abscissa() const {
    return std::visit(Overloaded{
                          [](const Exponential& f) { return -f.rate; },
                          [](const Erlang& f) { return -f.rate; },
                          [](const Pareto&) { return 0.0; },
                          [](const Lognormal&) { return 0.0; },
                          [](const Weibull& f) {
                              if (f.shape < 1.0) return 0.0;
                              if (f.shape == 1.0) return -1.0 / f.scale;
                              return -kInf;
                          },
                          [](const Uniform&) { return -kInf; },
                          [](const EmpiricalLattice&) { return -kInf; },
                      },
                      family_);
}

bool ClaimDistribution::lst_defined(double s) const {
    return s >= 0.0 || s > lst_abscissa();
}

double ClaimDistribution::lst(double s) const {
    if (s == 0.0) return 1.0;
    if (!lst_defined(s)) {
        std::ostringstream os;
        os << describe() << ": transform diverges at s=" << s;
        throw DivergentTransform(os.str());
    }
    // 1 - s int_0^inf e^{-sx} survival(x) dx; for s > 0 substitute y = s x.
    const auto by_parts = [&](double lower_mass_end) {
        if (s > 0.0) {
            const double y0 = s * lower_mass_end;
            const double head = -std::expm1(-y0);  // survival is 1 below lower_mass_end
            const double rest = integrate_half_line(
                [&](double y) { return std::exp(-y) * survival(y / s); }, y0);
            return 1.0 - head - rest;
        }
        const double a = -s;
        const double head = std::expm1(a * lower_mass_end) / a;
        const double rest = integrate_half_line(
            [&](double x) {
                const double tail = survival(x);
                return tail == 0.0 ? 0.0 : std::exp(a * x) * tail;
            },
            lower_mass_end);
        return 1.0 + a * (head + rest);
    };
    return std::visit(Overloaded{
                          [&](const Exponential& f) { return f.rate / (f.rate + s); },
                          [&](const Erlang& f) { return std::pow(f.rate / (f.rate + s), f.shape); },
                          [&](const Pareto& f) { return by_parts(f.scale); },
                          [&](const Lognormal&) { return by_parts(0.0); },
                          [&](const Weibull&) { return by_parts(0.0); },
                          [&](const Uniform& f) {
                              return (std::exp(-s * f.a) - std::exp(-s * f.b)) / (s * (f.b - f.a));
                          },
                          [&](const EmpiricalLattice& f) {
                              // piecewise-linear cdf: uniform density on each cell
                              const auto& g = f.grid;
                              const double h = g.step();
                              double acc = g.values().front();
                              for (std::size_t k = 0; k + 1 < g.size(); ++k) {
                                  const double m = g.values()[k + 1] - g.values()[k];
                                  if (m == 0.0) continue;
                                  const double x0 = g.node(k);
                                  acc += m * (std::exp(-s * x0) - std::exp(-s * (x0 + h))) / (s * h);
                              }
                              return acc;
                          },
                      },
                      family_);
}

double ClaimDistribution::sample(CounterRng& rng) const {
    return std::visit(Overloaded{
                          [&](const Exponential& f) { return rng.exponential(f.rate); },
                          [&](const Erlang& f) {
                              double acc = 0.0;
                              for (int i = 0; i < f.shape; ++i) acc += rng.exponential(f.rate);
                              return acc;
                          },
                          [&](const Pareto& f) { return f.scale * std::pow(rng.uniform(), -1.0 / f.alpha); },
                          [&](const Lognormal& f) { return std::exp(f.mu + f.sigma * normal_quantile(rng.uniform())); },
                          [&](const Weibull& f) { return f.scale * std::pow(-std::log(rng.uniform()), 1.0 / f.shape); },
                          [&](const Uniform& f) { return f.a + (f.b - f.a) * rng.uniform(); },
                          [&](const EmpiricalLattice& f) { return f.grid.quantile(rng.uniform()); },
                      },
                      family_);
}

LatticeMasses convolution_power_masses(const LatticeMasses& base, int n, std::size_t points) {
    if (n < 0) throw InvalidParams("convolution power must be non-negative");
    const std::size_t len = half_length(points);
    LatticeMasses result = unit_mass(base.step, points);
    if (n == 0) return result;
    LatticeMasses square = base;
    square.mass.resize(len, 0.0);
    bool first = true;
    for (unsigned k = static_cast<unsigned>(n); k > 0; k >>= 1) {
        if (k & 1u) {
            result = first ? square : convolve(result, square, len);
            first = false;
        }
        if (k > 1) square = convolve(square, square, len);
    }
    return result;
}

GriddedDistribution convolve_power(const ClaimDistribution& d, int n, double step, std::size_t points) {
    if (!(step > 0.0) || points < 2) throw InvalidParams("convolve_power: need step > 0 and points >= 2");
    const auto base = discretize_cdf([&](double x) { return d.cdf(x); }, step, points);
    auto grid = to_gridded(convolution_power_masses(base, n, points), points);
    if (grid.tail_mass() > kGridTooCoarseThreshold) {
        std::ostringstream os;
        os << "convolve_power: tail mass " << grid.tail_mass() << " beyond x=" << grid.upper() << " for n=" << n;
        throw GridTooCoarse(os.str());
    }
    return grid;
}

GriddedDistribution integrated_tail(const ClaimDistribution& d, double step, std::size_t points) {
    const double m = d.mean();
    if (!std::isfinite(m)) throw InfiniteMean("integrated tail: " + d.describe() + " has infinite mean");
    if (!(step > 0.0) || points < 2) throw InvalidParams("integrated_tail: need step > 0 and points >= 2");
    std::vector<double> out(points, 0.0);
    double acc = 0.0;
    double prev = d.survival(0.0);
    for (std::size_t k = 0; k + 1 < points; ++k) {
        const double next = d.survival(static_cast<double>(k + 1) * step);
        acc += 0.5 * step * (prev + next);
        out[k + 1] = std::min(1.0, acc / m);
        prev = next;
    }
    return GriddedDistribution::from_values(step, std::move(out));
}

LatticeShape default_lattice(double mean, double variance) {
    if (!(mean > 0.0) || !std::isfinite(mean)) throw InfiniteMean("default lattice needs a finite positive mean");
    const double step = 0.01 * mean;
    const double cover = std::isfinite(variance) ? mean + 40.0 * std::sqrt(variance) : 2000.0 * mean;
    constexpr std::size_t kMaxPoints = std::size_t{1} << 20;
    const auto points = static_cast<std::size_t>(std::ceil(cover / step)) + 1;
    return {step, std::clamp<std::size_t>(points, 2, kMaxPoints)};
}

}  // namespace ruin
