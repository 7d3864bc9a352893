#ifndef RUIN_LATTICE_HPP
#define RUIN_LATTICE_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ruin {

/// Residual tail mass above which a lattice result is rejected.
inline constexpr double kGridTooCoarseThreshold = 1e-3;

/// A cdf tabulated on the uniform lattice {0, h, 2h, ...}.
///
/// values()[k] is F(k h); tail_mass() is the probability left beyond the last
/// node. Between nodes the cdf is read by linear interpolation, which is also
/// the law used for inverse-cdf sampling.
class GriddedDistribution {
public:
    GriddedDistribution(double step, std::vector<double> values, double tail_mass);

    /// Builds a tabulation whose tail mass is 1 - values.back().
    static GriddedDistribution from_values(double step, std::vector<double> values);

    double step() const noexcept { return step_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double tail_mass() const noexcept { return tail_mass_; }
    double node(std::size_t k) const noexcept { return static_cast<double>(k) * step_; }
    double upper() const noexcept { return node(values_.size() - 1); }

    double cdf(double x) const;
    double survival(double x) const { return 1.0 - cdf(x); }
    double operator()(double x) const { return cdf(x); }

    /// Generalized inverse of the piecewise-linear cdf. Probabilities above the
    /// last tabulated value map to the last node.
    double quantile(double p) const;

    /// Mass of each cell [k h, (k+1) h); size() - 1 entries.
    std::vector<double> cell_masses() const;

    /// Integral of the survival function over the lattice (trapezoid).
    double mean() const;
    /// 2 * integral of x * survival(x) over the lattice (trapezoid).
    double second_moment() const;
    /// Lattice Laplace-Stieltjes transform: atom at 0 plus cell masses at cell midpoints.
    double lst(double s) const;

    /// Throws InvalidParams when the type invariants fail at tolerance `tol`.
    void validate(double tol = 1e-9) const;

private:
    double step_;
    std::vector<double> values_;
    double tail_mass_;
};

/// Point masses on the half-step lattice {0, h/2, h, 3h/2, ...}.
///
/// The mass of cell [k h, (k+1) h) lives at index 2k+1 (the cell midpoint);
/// index 0 holds a genuine atom at zero. Sums of midpoints land back on the
/// half lattice, so convolution powers and mixtures with different numbers of
/// summands share one representation.
struct LatticeMasses {
    double step = 0.0;          // node spacing h
    std::vector<double> mass;   // mass[i] sits at i * h / 2

    std::size_t size() const noexcept { return mass.size(); }
    double total() const;
};

/// Number of half-lattice slots needed to cover `points` nodes.
inline std::size_t half_length(std::size_t points) { return 2 * points - 1; }

/// Unit point mass at zero, i.e. F^{0*}.
LatticeMasses unit_mass(double step, std::size_t points);

/// Midpoint discretization of a cdf on `points` nodes.
LatticeMasses discretize_cdf(const std::function<double(double)>& cdf, double step,
                             std::size_t points);
LatticeMasses discretize(const GriddedDistribution& grid);

/// Linear convolution truncated to `max_len` half-lattice slots. Mass pushed
/// beyond the cut is dropped; slots below the cut are exact.
LatticeMasses convolve(const LatticeMasses& a, const LatticeMasses& b, std::size_t max_len);

/// Raw-array variant used by the solvers.
std::vector<double> convolve(std::span<const double> a, std::span<const double> b,
                             std::size_t max_len);

/// Adds `weight * src` into `dst` slot by slot (dst grows as needed).
void axpy(double weight, const LatticeMasses& src, LatticeMasses& dst);

/// CDF at the `points` lattice nodes: masses strictly below a node plus half of
/// the mass sitting on it (the atom at zero counts fully).
GriddedDistribution to_gridded(const LatticeMasses& m, std::size_t points);

/// The same node sums without clamping, for measures of any total mass.
std::vector<double> node_sums(const LatticeMasses& m, std::size_t points);

/// Integrated-tail tabulation (1/mean) * int_0^x survival(y) dy. Survival
/// integrals are summed from the right; mass left beyond the lattice comes
/// from a power-law fit of the last octave (`mean` is the fallback when the
/// fit does not give a finite integral).
GriddedDistribution integrated_tail_of(const GriddedDistribution& grid, double mean);

}  // namespace ruin

#endif  // RUIN_LATTICE_HPP
