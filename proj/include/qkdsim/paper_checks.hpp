#pragma once

#include <string>
#include <vector>

#include "qkdsim/scenario_io.hpp"

namespace qkdsim {

/// One reproduction check. For multi-part checks `observed` is the worst-case
/// deviation (or a success count) and `detail` says which part it came from.
struct CheckResult {
    std::string name;
    double expected = 0.0;
    double observed = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

/// All thirteen reproduction checks with fixed seeds; the determinism check
/// runs in-process (two identical runs through the CSV writer).
std::vector<CheckResult> run_paper_checks();

CsvReport paper_check_csv(const std::vector<CheckResult>& checks);

} // namespace qkdsim
