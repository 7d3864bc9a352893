#include "ruin/cli/report.hpp"

#include "ruin/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ruin::cli {

using nlohmann::json;

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) throw Error("csv row width does not match the header");
    rows_.push_back(std::move(cells));
    return *this;
}

std::string CsvTable::str() const {
    std::ostringstream os;
    const auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    };
    line(columns_);
    for (const auto& r : rows_) line(r);
    return os.str();
}

void CsvTable::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << str();
}

std::string cell(double x) { return format_number(x); }

std::string cell(const std::optional<double>& x) { return x ? format_number(*x) : std::string(); }

json flagged(double value, Method m) {
    json v = std::isfinite(value) ? json(value) : json(format_number(value));
    return {{"value", v}, {"method", to_string(m)}};
}

json flagged(const std::optional<Flagged<double>>& value, Method m, const std::string& why) {
    if (value) return flagged(value->value, value->method);
    return {{"value", nullptr}, {"method", to_string(m)}, {"note", why}};
}

json summary_json(const ReducedClModel& m, double c, const RuinReport& r) {
    json doc;
    doc["net_profit"] = true;
    doc["lambda"] = flagged(m.lambda, Method::closed_form);
    doc["lambda_tilde"] = flagged(m.lambda_tilde, Method::closed_form);
    doc["p0"] = flagged(m.p0, Method::closed_form);
    doc["y1_mean"] = flagged(m.y1_mean, Method::closed_form);
    doc["y1_variance"] = flagged(m.y1_variance(), Method::closed_form);
    doc["premium_rate"] = flagged(c, Method::closed_form);
    doc["rho"] = flagged(r.rho.value, r.rho.method);
    doc["psi0"] = flagged(r.psi0.value, r.psi0.method);
    doc["delta0"] = flagged(r.delta0.value, r.delta0.method);
    doc["expected_ruin_time_u0"] =
        flagged(r.expected_ruin_time_u0, Method::closed_form, "infinite variance of the group claim");
    doc["lundberg_epsilon"] = flagged(r.lundberg_epsilon, Method::root_find, "no exponential moment: no Lundberg exponent");
    doc["cl_constant"] = flagged(r.cl_constant, Method::lattice, "Cramer-Lundberg constant unavailable");
    doc["mean_deficit_u0"] = flagged(std::isfinite(m.y1_second_moment) ? m.y1_second_moment / (2.0 * m.y1_mean)
                                                                       : std::numeric_limits<double>::infinity(),
                                     Method::closed_form);
    doc["pk_truncation_error"] = flagged(r.psi.truncation_error, Method::lattice);
    doc["pk_terms"] = {{"needed", r.psi.terms_needed}, {"used", r.psi.terms_used}};
    doc["lattice"] = {{"step", m.step()}, {"points", m.points()}, {"y1_tail_mass", m.y1_grid.tail_mass()}};
    doc["heavy_tailed"] = m.heavy_tailed();
    return doc;
}

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

}  // namespace ruin::cli
