#ifndef RUIN_CATALOG_HPP
#define RUIN_CATALOG_HPP

#include "ruin/reduction.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ruin {

using PresetParams = std::map<std::string, std::vector<double>>;

struct PresetParam {
    std::string name;
    std::string meaning;
    std::vector<double> defaults;
};

struct PresetInfo {
    std::string name;
    int id;  // 1-based position in the catalog
    std::string title;
    std::size_t dim;
    std::vector<PresetParam> params;
};

/// The eight presets, in catalog order.
const std::vector<PresetInfo>& preset_catalog();

/// Throws UnknownPreset.
const PresetInfo& preset_info(const std::string& name);

struct Preset {
    ArrivalSpec arrivals;
    std::vector<GroupSizeModel> groups;
    std::size_t claim_slots;
};

/// Builds a preset; unspecified parameters take the catalog defaults.
/// Throws UnknownPreset or InvalidParams.
Preset make_preset(const std::string& name, const PresetParams& params = {});

/// A complete model from a preset: Exponential(1) claims in every slot unless
/// given, and (when no premium is given) c chosen so that rho = 1.
RiskModelSpec preset_spec(const std::string& name, const PresetParams& params = {},
                          std::optional<std::vector<ClaimDistribution>> claims = std::nullopt,
                          std::optional<double> premium_rate = std::nullopt, double initial_capital = 0.0);

}  // namespace ruin

#endif  // RUIN_CATALOG_HPP
