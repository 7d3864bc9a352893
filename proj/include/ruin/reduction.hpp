#ifndef RUIN_REDUCTION_HPP
#define RUIN_REDUCTION_HPP

#include "ruin/distributions.hpp"
#include "ruin/group_models.hpp"
#include "ruin/lattice.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ruin {

/// The user-facing model R(t) = u + c t - S(t).
///
/// In single-stream mode `groups` holds one joint law of dimension d; in
/// independent-streams mode it holds one univariate law per stream.
struct RiskModelSpec {
    ArrivalSpec arrivals;
    std::vector<GroupSizeModel> groups;
    std::vector<ClaimDistribution> claims;
    double premium_rate = 0.0;
    double initial_capital = 0.0;

    std::size_t dim() const noexcept { return claims.size(); }
    /// Throws InvalidParams on dimension or range violations.
    void validate() const;
};

/// Lattice-free part of the reduction: intensity, group law and exact moments.
struct ReducedLaw {
    double lambda_tilde = 0.0;  // intensity of all groups, empty ones included
    double p0 = 0.0;            // probability of an empty group
    bool thinned = true;        // false keeps the empty groups (lambda = lambda_tilde)
    double lambda = 0.0;
    GroupSizeModel groups;      // law of the counts attached to each arrival
    std::vector<ClaimDistribution> claims;
    double y1_mean = 0.0;
    double y1_second_moment = 0.0;

    double y1_variance() const;
    /// Some claim type with positive count mass is heavy tailed.
    bool heavy_tailed() const;
    /// l_{Y1}(s) through the group pgf at the per-type transforms.
    double y1_lst(double s) const;
    bool y1_lst_defined(double s) const;
};

/// Options for the lattice part. step = 0 or points = 0 pick default_lattice
/// for Y1; heavy-tailed laws get at least 1000 means of coverage.
struct LatticeOptions {
    double step = 0.0;
    std::size_t points = 0;
    bool thin = true;
    /// Also tabulate F_I through the unconditioned (empty-inclusive) law.
    bool source_route = false;
};

struct ReducedClModel : ReducedLaw {
    GriddedDistribution y1_grid;
    GriddedDistribution fi_grid;
    std::optional<GriddedDistribution> fi_source_grid;

    double step() const noexcept { return y1_grid.step(); }
    std::size_t points() const noexcept { return y1_grid.size(); }
};

ReducedLaw reduce_law(const RiskModelSpec& spec, bool thin = true);

LatticeShape default_lattice(const ReducedLaw& law);

/// Mixture over the group law of products of per-type convolution powers, on
/// the lattice. Throws GridTooCoarse when Y1 leaks more than the threshold.
ReducedClModel reduce(const RiskModelSpec& spec, const LatticeOptions& options = {});

/// Mixture of per-type convolution powers for an arbitrary atom list (the zero
/// vector maps to the unit mass at 0).
LatticeMasses mixture_masses(const std::vector<CountAtom>& atoms, const std::vector<ClaimDistribution>& claims,
                             double step, std::size_t points);

/// The single-stream, empty-free spec with the same aggregate claims.
RiskModelSpec thinned_spec(const RiskModelSpec& spec);
/// Independent streams rewritten as one merged stream (empties kept).
RiskModelSpec merged_spec(const RiskModelSpec& spec);

struct EquivalenceRow {
    std::string quantity;
    double a;
    double b;
    double delta;
    double tolerance;
    bool agree;
};

struct EquivalenceReport {
    std::vector<EquivalenceRow> rows;
    bool equivalent = true;
};

inline constexpr double kExactTolerance = 1e-8;
inline constexpr double kLatticeTolerance = 1e-6;

/// Compares the aggregate-claim layers of two specs (premium and capital are
/// ignored): lambda, Y1 moments, l_{Y1} on an s-grid and the F_I lattices.
EquivalenceReport equivalence_report(const RiskModelSpec& a, const RiskModelSpec& b);

}  // namespace ruin

#endif  // RUIN_REDUCTION_HPP
