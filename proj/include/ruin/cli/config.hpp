#ifndef RUIN_CLI_CONFIG_HPP
#define RUIN_CLI_CONFIG_HPP

#include "ruin/catalog.hpp"
#include "ruin/reduction.hpp"
#include "ruin/simulation.hpp"

#include <json.hpp>

#include <string>

namespace ruin::cli {

struct Numerics {
    double step = 0.0;       // 0: default lattice
    std::size_t points = 0;  // 0: default lattice
    double tol = 1e-6;
};

struct ModelConfig {
    RiskModelSpec spec;
    Numerics numerics;
    SimulationConfig simulation;
};

/// Reads a model document. Throws SchemaError on unknown keys, wrong types,
/// out-of-range values or dimension disagreement.
ModelConfig parse_config(const nlohmann::json& doc);

/// Throws ConfigParseError when the file cannot be read or is not valid JSON.
ModelConfig load_config(const std::string& path);

ClaimDistribution parse_claim(const nlohmann::json& node);
GroupSizeModel parse_group(const nlohmann::json& node);

/// A preset with default claims and a premium giving rho = 1.
ModelConfig preset_config(const std::string& name, const PresetParams& params = {});

/// "key=v1,v2,..." into a parameter map entry. Throws SchemaError.
void parse_preset_param(const std::string& text, PresetParams& into);

/// Round trip of a spec into the document format (presets included).
nlohmann::json to_json(const ModelConfig& config);

}  // namespace ruin::cli

#endif  // RUIN_CLI_CONFIG_HPP
