#include "ruin/catalog.hpp"

#include "ruin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ruin {

namespace {

std::vector<double> param(const PresetInfo& info, const PresetParams& given, const std::string& key) {
    const auto it = given.find(key);
    if (it != given.end()) return it->second;
    for (const auto& p : info.params)
        if (p.name == key) return p.defaults;
    throw InvalidParams("preset " + info.name + ": no parameter named " + key);
}

double scalar(const PresetInfo& info, const PresetParams& given, const std::string& key) {
    const auto v = param(info, given, key);
    if (v.size() != 1) throw InvalidParams("preset " + info.name + ": parameter " + key + " takes one value");
    return v[0];
}

int integer(const PresetInfo& info, const PresetParams& given, const std::string& key) {
    const double v = scalar(info, given, key);
    if (v != std::floor(v) || v < 1) throw InvalidParams("preset " + info.name + ": " + key + " must be a positive integer");
    return static_cast<int>(v);
}

void check_keys(const PresetInfo& info, const PresetParams& given) {
    for (const auto& [key, value] : given) {
        const bool known = std::any_of(info.params.begin(), info.params.end(), [&](const auto& p) { return p.name == key; });
        if (!known) throw InvalidParams("preset " + info.name + ": unknown parameter " + key);
    }
}

}  // namespace

const std::vector<PresetInfo>& preset_catalog() {
    static const std::vector<PresetInfo> catalog{
        {"poisson-order-k", 1, "Poisson risk process of order k: group sizes uniform on {1..k}", 1,
         {{"k", "largest group size", {3}}, {"lambda", "group intensity", {1}}}},
        {"polya-aeppli-order-k", 2, "Polya-Aeppli of order k: truncated geometric group sizes on {1..k}", 1,
         {{"p", "geometric parameter in (0,1)", {0.5}}, {"k", "largest group size", {2}}, {"lambda", "group intensity", {1}}}},
        {"neg-multinomial", 3, "dependent counts, negative multinomial (n; p_1..p_d)", 2,
         {{"n", "shape (positive integer)", {2}}, {"p", "type probabilities, sum below 1", {0.2, 0.1}},
          {"lambda", "group intensity", {1}}}},
        {"independent-neg-binomial", 4, "independent streams, negative binomial (n_s, p_s) counts with empty groups", 2,
         {{"n", "shapes n_s", {1, 2}}, {"p", "probabilities p_s in (0,1)", {0.6, 0.7}}, {"lambda", "stream intensities", {1, 1}}}},
        {"polya-aeppli", 5, "independent streams, shifted negative binomial (n_s, p_s) counts", 2,
         {{"n", "shapes n_s", {1, 1}}, {"p", "probabilities p_s in (0,1)", {0.6, 0.5}}, {"lambda", "stream intensities", {1, 0.5}}}},
        {"compound-compound", 6, "compound compound Poisson: arbitrary pmf of the group size", 1,
         {{"pmf", "P(U = 0), P(U = 1), ...", {0.2, 0.5, 0.3}}, {"lambda", "group intensity", {1}}}},
        {"wang-lines", 7, "lines of business with at most one claim per type, empty groups allowed", 2,
         {{"probs", "P(types in bit mask claim), 2^d entries", {0.3, 0.3, 0.2, 0.2}}, {"lambda", "group intensity", {1}}}},
        {"common-shock", 8, "Poisson model with common shock, three types", 3,
         {{"rates", "l11 l22 l33 l12 l13 l23 l123", {1, 1, 1, 1, 1, 1, 1}}}},
    };
    return catalog;
}

const PresetInfo& preset_info(const std::string& name) {
    const auto& all = preset_catalog();
    const auto it = std::find_if(all.begin(), all.end(), [&](const auto& p) { return p.name == name; });
    if (it == all.end()) {
        std::ostringstream os;
        os << "unknown preset '" << name << "'; known presets:";
        for (const auto& p : all) os << ' ' << p.name;
        throw UnknownPreset(os.str());
    }
    return *it;
}

Preset make_preset(const std::string& name, const PresetParams& given) {
    const auto& info = preset_info(name);
    check_keys(info, given);

    const auto independent = [&](bool shifted) {
        const auto n = param(info, given, "n");
        const auto p = param(info, given, "p");
        const auto lambda = param(info, given, "lambda");
        if (n.size() != p.size() || n.size() != lambda.size() || n.empty()) {
            throw InvalidParams("preset " + name + ": n, p and lambda need one entry per type");
        }
        std::vector<GroupSizeModel> groups;
        for (std::size_t s = 0; s < n.size(); ++s) {
            groups.push_back(shifted ? GroupSizeModel::shifted_negative_binomial(n[s], p[s])
                                     : GroupSizeModel::negative_binomial(n[s], p[s]));
        }
        return Preset{ArrivalSpec::independent(lambda), std::move(groups), n.size()};
    };

    switch (info.id) {
        case 1:
            return {ArrivalSpec::single(scalar(info, given, "lambda")),
                    {GroupSizeModel::uniform_order_k(integer(info, given, "k"))}, 1};
        case 2:
            return {ArrivalSpec::single(scalar(info, given, "lambda")),
                    {GroupSizeModel::truncated_geometric_order_k(scalar(info, given, "p"), integer(info, given, "k"))}, 1};
        case 3: {
            const double n = scalar(info, given, "n");
            if (n != std::floor(n) || n < 1) throw InvalidParams("preset neg-multinomial: n must be a positive integer");
            auto g = GroupSizeModel::negative_multinomial(n, param(info, given, "p"));
            const auto d = g.dim();
            return {ArrivalSpec::single(scalar(info, given, "lambda")), {std::move(g)}, d};
        }
        case 4:
            return independent(false);
        case 5:
            return independent(true);
        case 6:
            return {ArrivalSpec::single(scalar(info, given, "lambda")),
                    {GroupSizeModel::from_pmf(param(info, given, "pmf")).with_family("compound-compound")}, 1};
        case 7: {
            auto g = GroupSizeModel::binary_lines(param(info, given, "probs"));
            const auto d = g.dim();
            return {ArrivalSpec::single(scalar(info, given, "lambda")), {std::move(g)}, d};
        }
        case 8: {
            const auto r = param(info, given, "rates");
            if (r.size() != 7) throw InvalidParams("preset common-shock: needs seven rates");
            std::array<double, 7> rates{};
            std::copy(r.begin(), r.end(), rates.begin());
            auto g = GroupSizeModel::common_shock(rates);
            double total = 0.0;
            for (double x : rates) total += x;
            return {ArrivalSpec::single(total), {std::move(g)}, 3};
        }
        default:
            throw UnknownPreset("preset table out of sync: " + name);
    }
}

RiskModelSpec preset_spec(const std::string& name, const PresetParams& params,
                          std::optional<std::vector<ClaimDistribution>> claims, std::optional<double> premium_rate,
                          double initial_capital) {
    auto preset = make_preset(name, params);
    std::vector<ClaimDistribution> laws;
    if (claims) {
        laws = std::move(*claims);
        if (laws.size() != preset.claim_slots) {
            throw InvalidParams("preset " + name + ": expects " + std::to_string(preset.claim_slots) + " claim laws");
        }
    } else {
        laws.assign(preset.claim_slots, ClaimDistribution::exponential(1.0));
    }
    RiskModelSpec spec{std::move(preset.arrivals), std::move(preset.groups), std::move(laws), 1.0, initial_capital};
    if (premium_rate) {
        spec.premium_rate = *premium_rate;
    } else {
        const auto law = reduce_law(spec);
        spec.premium_rate = 2.0 * law.lambda * law.y1_mean;
    }
    spec.validate();
    return spec;
}

}  // namespace ruin
