#pragma once

#include <string>
#include <vector>

#include "qkdsim/engine.hpp"

namespace qkdsim {

inline constexpr const char* kScenarioSchemaVersion = "1";

/// Parse a scenario document (JSON text). Unknown keys and unsupported
/// schema versions are rejected with ValidationError.
Scenario parse_scenario(const std::string& json_text);

Scenario load_scenario_file(const std::string& path);

/// Inverse of parse_scenario: serializing and re-parsing yields an identical
/// Scenario.
std::string serialize_scenario(const Scenario& s);

/// Header row plus stringified data rows; written verbatim, so identical
/// inputs give byte-identical files.
struct CsvReport {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_string() const;
    void write_file(const std::string& path) const;
};

/// Full-precision decimal formatting used for every CSV numeric field.
std::string format_number(double v);

CsvReport run_result_csv(const SimResult& res);
CsvReport sweep_csv(const Scenario& base, const std::string& parameter,
                    const std::vector<std::pair<double, SimResult>>& results);

} // namespace qkdsim
