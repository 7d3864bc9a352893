#ifndef RUIN_GROUP_MODELS_HPP
#define RUIN_GROUP_MODELS_HPP

#include "ruin/errors.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ruin {

/// One point of a joint claim-count law: the count vector of a group and its
/// probability. T is double in the library; the conditioning helpers below are
/// templates so tests can run them in exact rational arithmetic.
template <class T>
struct BasicCountAtom {
    std::vector<int> counts;
    T prob;
};
using CountAtom = BasicCountAtom<double>;

inline bool is_empty_group(const std::vector<int>& counts) {
    for (int c : counts)
        if (c != 0) return false;
    return true;
}

template <class T>
T empty_mass(const std::vector<BasicCountAtom<T>>& atoms) {
    T p0(0);
    for (const auto& a : atoms)
        if (is_empty_group(a.counts)) p0 += a.prob;
    return p0;
}

/// Law of the counts given a non-empty group: drop the zero atom, rescale by 1/(1-p0).
template <class T>
std::vector<BasicCountAtom<T>> condition_atoms(const std::vector<BasicCountAtom<T>>& atoms) {
    const T keep = T(1) - empty_mass(atoms);
    if (keep <= T(0)) throw DegenerateModel("group law has all of its mass on the empty group");
    std::vector<BasicCountAtom<T>> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms) {
        if (is_empty_group(a.counts)) continue;
        out.push_back({a.counts, a.prob / keep});
    }
    return out;
}

template <class T>
T marginal_mean(const std::vector<BasicCountAtom<T>>& atoms, std::size_t s) {
    T acc(0);
    for (const auto& a : atoms) acc += a.prob * T(a.counts.at(s));
    return acc;
}

template <class T>
T marginal_variance(const std::vector<BasicCountAtom<T>>& atoms, std::size_t s) {
    const T m = marginal_mean(atoms, s);
    T acc(0);
    for (const auto& a : atoms) {
        const T dev = T(a.counts.at(s)) - m;
        acc += a.prob * dev * dev;
    }
    return acc;
}

/// Tail mass below which infinite count supports are cut (then renormalized).
inline constexpr double kCountTruncationTail = 1e-10;

/// Joint law of the claim counts (one coordinate per claim type) of a group.
///
/// Stored as a sparse atom list, sorted lexicographically with duplicates
/// merged. Families with infinite support are truncated at the smallest total
/// count R whose tail is below kCountTruncationTail; R is kept in truncation().
/// The optional pgf domain marks where the untruncated generating function
/// converges, so transforms in the moment direction refuse points the
/// truncation would otherwise hide.
class GroupSizeModel {
public:
    using Domain = std::function<bool(std::span<const double>)>;

    GroupSizeModel(std::size_t dim, std::vector<CountAtom> atoms, std::string family = "pmf",
                   std::optional<int> truncation = std::nullopt, Domain pgf_domain = {});

    /// d = 1, pmf[k] = P(U = k).
    static GroupSizeModel from_pmf(std::vector<double> pmf);
    static GroupSizeModel point_mass(std::vector<int> counts);
    /// d = 1, uniform on {1..k}.
    static GroupSizeModel uniform_order_k(int k);
    /// d = 1, P(U = i) proportional to p(1-p)^(i-1) on {1..k}.
    static GroupSizeModel truncated_geometric_order_k(double p, int k);
    /// d = 1, failure count: P(U = k) = C(n+k-1, k) p^n (1-p)^k, k >= 0.
    static GroupSizeModel negative_binomial(double n, double p);
    /// d = 1, trial count up to the n-th success: support {n, n+1, ...}.
    static GroupSizeModel shifted_negative_binomial(double n, double p);
    /// pgf (p0 / (1 - sum p_s z_s))^n with p0 = 1 - sum p_s.
    static GroupSizeModel negative_multinomial(double n, std::vector<double> p);
    /// d = 3; rates in the order l11, l22, l33, l12, l13, l23, l123.
    static GroupSizeModel common_shock(const std::array<double, 7>& rates);
    /// probs[mask] is the probability that exactly the types in the bit mask
    /// report one claim each; probs.size() = 2^d.
    static GroupSizeModel binary_lines(std::vector<double> probs);

    std::size_t dim() const noexcept { return dim_; }
    const std::vector<CountAtom>& atoms() const noexcept { return atoms_; }
    const std::string& family() const noexcept { return family_; }
    std::optional<int> truncation() const noexcept { return truncation_; }
    const Domain& pgf_domain() const noexcept { return domain_; }

    double p0() const;
    double pmf(const std::vector<int>& counts) const;
    double total_mass() const;

    /// E prod z_s^{U_s}. Throws DivergentTransform outside the family's domain.
    double pgf(std::span<const double> z) const;
    bool pgf_converges(std::span<const double> z) const;

    double mean(std::size_t s) const;
    double variance(std::size_t s) const;
    /// Smallest and largest count of type s carrying positive mass.
    std::pair<int, int> support(std::size_t s) const;

    GroupSizeModel with_family(std::string family) const;

private:
    std::size_t dim_;
    std::vector<CountAtom> atoms_;
    std::string family_;
    std::optional<int> truncation_;
    Domain domain_;
};

/// Law of the counts given a non-empty group. Throws DegenerateModel when
/// p0 >= 1 - 1e-12.
GroupSizeModel condition_nonempty(const GroupSizeModel& g);

/// Group arrival layer: one Poisson stream of groups with a joint count law,
/// or d independent streams with one univariate count law each.
struct ArrivalSpec {
    enum class Mode { single_stream, independent_streams };

    Mode mode = Mode::single_stream;
    std::vector<double> intensities;

    static ArrivalSpec single(double rate) { return {Mode::single_stream, {rate}}; }
    static ArrivalSpec independent(std::vector<double> rates) {
        return {Mode::independent_streams, std::move(rates)};
    }

    double total() const;
    void validate() const;
};

struct MergedStreams {
    double lambda_tilde;         // sum of stream intensities
    GroupSizeModel merged;       // mixture law, may put mass on the empty group
    double lambda;               // intensity of non-empty groups
    GroupSizeModel conditioned;  // merged law given a non-empty group
};

/// Superposition of independent streams. per_type[s] is the univariate count
/// law of stream s; an arrival on stream s carries counts only in coordinate s.
MergedStreams merge_streams(std::span<const double> intensities, const std::vector<GroupSizeModel>& per_type);

struct ThinnedStream {
    double lambda;
    GroupSizeModel groups;
};

/// Removes empty groups: intensity lambda_tilde (1 - p0), conditioned law.
ThinnedStream thin_empty(double lambda_tilde, const GroupSizeModel& g);

}  // namespace ruin

#endif  // RUIN_GROUP_MODELS_HPP
