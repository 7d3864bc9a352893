#ifndef RUIN_CLI_REPORT_HPP
#define RUIN_CLI_REPORT_HPP

#include "ruin/ruin_analytics.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ruin::cli {

/// Shortest round-trip-safe text for a double ("inf", "nan" spelled out).
std::string format_number(double x);

/// A CSV table held in memory; cells are written verbatim.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    CsvTable& row(std::vector<std::string> cells);
    std::string str() const;
    void write(const std::filesystem::path& path) const;
    std::size_t rows() const noexcept { return rows_.size(); }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

std::string cell(double x);
std::string cell(const std::optional<double>& x);

/// {"value": v, "method": m}; absent values become {"value": null, "method": m, "note": why}.
nlohmann::json flagged(double value, Method m);
nlohmann::json flagged(const std::optional<Flagged<double>>& value, Method m, const std::string& why);

/// Scalars of a RuinReport with their method flags.
nlohmann::json summary_json(const ReducedClModel& m, double c, const RuinReport& r);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace ruin::cli

#endif  // RUIN_CLI_REPORT_HPP
