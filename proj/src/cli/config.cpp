#include "ruin/cli/config.hpp"

#include "ruin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ruin::cli {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& what) {
    throw SchemaError(where + ": " + what);
}

void allow_keys(const json& node, const std::string& where, std::initializer_list<const char*> keys) {
    if (!node.is_object()) schema(where, "expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : node.items())
        if (!allowed.count(key)) schema(where, "unknown key '" + key + "'");
}

double number(const json& node, const std::string& where) {
    if (!node.is_number()) schema(where, "expected a number");
    return node.get<double>();
}

std::vector<double> numbers(const json& node, const std::string& where) {
    if (node.is_number()) return {node.get<double>()};
    if (!node.is_array()) schema(where, "expected a number or an array of numbers");
    std::vector<double> out;
    for (const auto& x : node) out.push_back(number(x, where));
    return out;
}

const json& required(const json& node, const char* key, const std::string& where) {
    if (!node.contains(key)) schema(where, std::string("missing key '") + key + "'");
    return node.at(key);
}

double param(const json& params, const char* key, const std::string& where) {
    const auto v = numbers(required(params, key, where), where + "." + key);
    if (v.size() != 1) schema(where + "." + key, "expected one number");
    return v[0];
}

int integer_param(const json& params, const char* key, const std::string& where) {
    const double v = param(params, key, where);
    if (v != std::floor(v)) schema(where + "." + key, "expected an integer");
    return static_cast<int>(v);
}

// Library range errors inside a config surface as schema errors.
template <class F>
auto in_schema(const std::string& where, F f) -> decltype(f()) {
    try {
        return f();
    } catch (const InvalidParams& e) {
        schema(where, e.what());
    } catch (const DegenerateModel& e) {
        schema(where, e.what());
    }
}

json atoms_json(const GroupSizeModel& g) {
    json atoms = json::array();
    for (const auto& a : g.atoms()) atoms.push_back({{"counts", a.counts}, {"p", a.prob}});
    return {{"atoms", atoms}};
}

json claim_json(const ClaimDistribution& d) {
    return std::visit(
        [](const auto& f) -> json {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Exponential>) return {{"family", "exponential"}, {"params", {{"rate", f.rate}}}};
            if constexpr (std::is_same_v<T, Erlang>)
                return {{"family", "erlang"}, {"params", {{"shape", f.shape}, {"rate", f.rate}}}};
            if constexpr (std::is_same_v<T, Pareto>)
                return {{"family", "pareto"}, {"params", {{"alpha", f.alpha}, {"scale", f.scale}}}};
            if constexpr (std::is_same_v<T, Lognormal>)
                return {{"family", "lognormal"}, {"params", {{"mu", f.mu}, {"sigma", f.sigma}}}};
            if constexpr (std::is_same_v<T, Weibull>)
                return {{"family", "weibull"}, {"params", {{"shape", f.shape}, {"scale", f.scale}}}};
            if constexpr (std::is_same_v<T, Uniform>) return {{"family", "uniform"}, {"params", {{"a", f.a}, {"b", f.b}}}};
            if constexpr (std::is_same_v<T, EmpiricalLattice>)
                throw SchemaError("lattice claim laws cannot be written to a config");
        },
        d.family());
}

}  // namespace

ClaimDistribution parse_claim(const json& node) {
    const std::string where = "claims[]";
    allow_keys(node, where, {"family", "params"});
    const auto& fam = required(node, "family", where);
    if (!fam.is_string()) schema(where + ".family", "expected a string");
    const auto family = fam.get<std::string>();
    const json params = node.contains("params") ? node.at("params") : json::object();
    const std::string at = where + "(" + family + ")";
    return in_schema(at, [&] {
        if (family == "exponential") {
            allow_keys(params, at, {"rate"});
            return ClaimDistribution::exponential(param(params, "rate", at));
        }
        if (family == "erlang") {
            allow_keys(params, at, {"shape", "rate"});
            return ClaimDistribution::erlang(integer_param(params, "shape", at), param(params, "rate", at));
        }
        if (family == "pareto") {
            allow_keys(params, at, {"alpha", "scale"});
            return ClaimDistribution::pareto(param(params, "alpha", at), param(params, "scale", at));
        }
        if (family == "lognormal") {
            allow_keys(params, at, {"mu", "sigma"});
            return ClaimDistribution::lognormal(param(params, "mu", at), param(params, "sigma", at));
        }
        if (family == "weibull") {
            allow_keys(params, at, {"shape", "scale"});
            return ClaimDistribution::weibull(param(params, "shape", at), param(params, "scale", at));
        }
        if (family == "uniform") {
            allow_keys(params, at, {"a", "b"});
            return ClaimDistribution::uniform(param(params, "a", at), param(params, "b", at));
        }
        schema(where, "unknown claim family '" + family + "'");
    });
}

GroupSizeModel parse_group(const json& node) {
    const std::string where = "groups";
    if (!node.is_object()) schema(where, "expected an object");
    if (node.contains("atoms")) {
        allow_keys(node, where, {"atoms"});
        const auto& atoms = node.at("atoms");
        if (!atoms.is_array() || atoms.empty()) schema(where + ".atoms", "expected a non-empty array");
        std::vector<CountAtom> out;
        std::size_t dim = 0;
        for (const auto& a : atoms) {
            allow_keys(a, where + ".atoms[]", {"counts", "p"});
            const auto& counts = required(a, "counts", where + ".atoms[]");
            if (!counts.is_array() || counts.empty()) schema(where + ".atoms[].counts", "expected a non-empty array");
            std::vector<int> c;
            for (const auto& x : counts) {
                if (!x.is_number_integer()) schema(where + ".atoms[].counts", "expected integers");
                c.push_back(x.get<int>());
            }
            if (dim == 0) dim = c.size();
            out.push_back({std::move(c), number(required(a, "p", where + ".atoms[]"), where + ".atoms[].p")});
        }
        return in_schema(where, [&] { return GroupSizeModel(dim, std::move(out)); });
    }

    allow_keys(node, where, {"family", "params"});
    const auto& fam = required(node, "family", where);
    if (!fam.is_string()) schema(where + ".family", "expected a string");
    const auto family = fam.get<std::string>();
    const json params = node.contains("params") ? node.at("params") : json::object();
    const std::string at = where + "(" + family + ")";
    return in_schema(at, [&] {
        if (family == "uniform-order-k") {
            allow_keys(params, at, {"k"});
            return GroupSizeModel::uniform_order_k(integer_param(params, "k", at));
        }
        if (family == "truncated-geometric-order-k") {
            allow_keys(params, at, {"p", "k"});
            return GroupSizeModel::truncated_geometric_order_k(param(params, "p", at), integer_param(params, "k", at));
        }
        if (family == "neg-binomial") {
            allow_keys(params, at, {"n", "p"});
            return GroupSizeModel::negative_binomial(param(params, "n", at), param(params, "p", at));
        }
        if (family == "shifted-neg-binomial") {
            allow_keys(params, at, {"n", "p"});
            return GroupSizeModel::shifted_negative_binomial(param(params, "n", at), param(params, "p", at));
        }
        if (family == "neg-multinomial") {
            allow_keys(params, at, {"n", "p"});
            return GroupSizeModel::negative_multinomial(param(params, "n", at),
                                                        numbers(required(params, "p", at), at + ".p"));
        }
        if (family == "common-shock") {
            allow_keys(params, at, {"rates"});
            const auto r = numbers(required(params, "rates", at), at + ".rates");
            if (r.size() != 7) schema(at + ".rates", "expected seven rates");
            std::array<double, 7> rates{};
            std::copy(r.begin(), r.end(), rates.begin());
            return GroupSizeModel::common_shock(rates);
        }
        if (family == "pmf") {
            allow_keys(params, at, {"pmf"});
            return GroupSizeModel::from_pmf(numbers(required(params, "pmf", at), at + ".pmf"));
        }
        if (family == "wang-lines") {
            allow_keys(params, at, {"probs"});
            return GroupSizeModel::binary_lines(numbers(required(params, "probs", at), at + ".probs"));
        }
        schema(where, "unknown group family '" + family + "'");
    });
}

ModelConfig parse_config(const json& doc) {
    allow_keys(doc, "config",
               {"arrivals", "groups", "claims", "premium_rate", "initial_capital", "numerics", "simulation", "comment"});
    ModelConfig cfg{RiskModelSpec{}, Numerics{}, SimulationConfig{}};
    auto& spec = cfg.spec;

    const auto& arrivals = required(doc, "arrivals", "config");
    allow_keys(arrivals, "arrivals", {"mode", "intensities"});
    const auto& mode = required(arrivals, "mode", "arrivals");
    if (!mode.is_string()) schema("arrivals.mode", "expected a string");
    const auto rates = numbers(required(arrivals, "intensities", "arrivals"), "arrivals.intensities");
    if (mode == "single") {
        if (rates.size() != 1) schema("arrivals.intensities", "single mode takes one intensity");
        spec.arrivals = ArrivalSpec::single(rates[0]);
    } else if (mode == "independent") {
        spec.arrivals = ArrivalSpec::independent(rates);
    } else {
        schema("arrivals.mode", "expected 'single' or 'independent'");
    }

    const auto& groups = required(doc, "groups", "config");
    if (spec.arrivals.mode == ArrivalSpec::Mode::independent_streams) {
        allow_keys(groups, "groups", {"per_type"});
        const auto& per_type = required(groups, "per_type", "groups");
        if (!per_type.is_array()) schema("groups.per_type", "expected an array");
        for (const auto& g : per_type) spec.groups.push_back(parse_group(g));
    } else {
        spec.groups.push_back(parse_group(groups));
    }

    const auto& claims = required(doc, "claims", "config");
    if (!claims.is_array() || claims.empty()) schema("claims", "expected a non-empty array");
    for (const auto& c : claims) spec.claims.push_back(parse_claim(c));

    spec.premium_rate = number(required(doc, "premium_rate", "config"), "premium_rate");
    spec.initial_capital = doc.contains("initial_capital") ? number(doc.at("initial_capital"), "initial_capital") : 0.0;

    if (doc.contains("numerics")) {
        const auto& n = doc.at("numerics");
        allow_keys(n, "numerics", {"step", "points", "tol"});
        if (n.contains("step")) cfg.numerics.step = number(n.at("step"), "numerics.step");
        if (n.contains("points")) {
            const double p = number(n.at("points"), "numerics.points");
            if (p < 2 || p != std::floor(p)) schema("numerics.points", "expected an integer >= 2");
            cfg.numerics.points = static_cast<std::size_t>(p);
        }
        if (n.contains("tol")) cfg.numerics.tol = number(n.at("tol"), "numerics.tol");
        if (cfg.numerics.step < 0.0) schema("numerics.step", "must be positive");
        if (!(cfg.numerics.tol > 0.0 && cfg.numerics.tol < 1.0)) schema("numerics.tol", "must lie in (0,1)");
    }
    if (doc.contains("simulation")) {
        const auto& s = doc.at("simulation");
        allow_keys(s, "simulation", {"replications", "horizon", "seed", "stream_stride"});
        const auto count = [&](const char* key) {
            const auto& v = s.at(key);
            if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
                schema(std::string("simulation.") + key, "expected a positive integer");
            }
            return v.get<std::uint64_t>();
        };
        if (s.contains("replications")) cfg.simulation.replications = count("replications");
        if (s.contains("horizon")) cfg.simulation.horizon = number(s.at("horizon"), "simulation.horizon");
        if (s.contains("seed")) {
            if (!s.at("seed").is_number_integer()) schema("simulation.seed", "expected an integer");
            cfg.simulation.seed = s.at("seed").get<std::uint64_t>();
        }
        if (s.contains("stream_stride")) cfg.simulation.stream_stride = count("stream_stride");
        in_schema("simulation", [&] { cfg.simulation.validate(); });
    }
    in_schema("config", [&] { spec.validate(); });
    return cfg;
}

ModelConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParseError("cannot read config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigParseError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

ModelConfig preset_config(const std::string& name, const PresetParams& params) {
    return ModelConfig{preset_spec(name, params), Numerics{}, SimulationConfig{}};
}

void parse_preset_param(const std::string& text, PresetParams& into) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw SchemaError("preset parameter '" + text + "' is not key=value");
    std::vector<double> values;
    std::stringstream ss(text.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw SchemaError("preset parameter '" + text + "': '" + item + "' is not a number");
        }
    }
    if (values.empty()) throw SchemaError("preset parameter '" + text + "' has no values");
    into[text.substr(0, eq)] = std::move(values);
}

json to_json(const ModelConfig& config) {
    const auto& spec = config.spec;
    json doc;
    const bool single = spec.arrivals.mode == ArrivalSpec::Mode::single_stream;
    doc["arrivals"] = {{"mode", single ? "single" : "independent"}, {"intensities", spec.arrivals.intensities}};
    if (single) {
        doc["groups"] = atoms_json(spec.groups[0]);
    } else {
        json per = json::array();
        for (const auto& g : spec.groups) per.push_back(atoms_json(g));
        doc["groups"] = {{"per_type", per}};
    }
    doc["claims"] = json::array();
    for (const auto& c : spec.claims) doc["claims"].push_back(claim_json(c));
    doc["premium_rate"] = spec.premium_rate;
    doc["initial_capital"] = spec.initial_capital;
    json numerics = {{"tol", config.numerics.tol}};
    if (config.numerics.step > 0.0) numerics["step"] = config.numerics.step;
    if (config.numerics.points > 0) numerics["points"] = config.numerics.points;
    doc["numerics"] = numerics;
    doc["simulation"] = {{"replications", config.simulation.replications},
                         {"horizon", config.simulation.horizon},
                         {"seed", config.simulation.seed},
                         {"stream_stride", config.simulation.stream_stride}};
    return doc;
}

}  // namespace ruin::cli
