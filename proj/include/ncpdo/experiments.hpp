#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncpdo/grid.hpp"
#include "ncpdo/lp.hpp"
#include "ncpdo/symbol.hpp"

namespace ncpdo {

using json = nlohmann::json;

const std::vector<std::string>& experiment_kinds();

struct ExperimentConfig {
    std::string kind;
    json params = json::object(); // filled with every default actually used
    std::uint64_t seed = 1;
    double budget_mb = 2048;
    int threads = 1;
};

struct ExperimentResult {
    json report;
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
    bool pass = true;

    std::string csv() const;
};

// TOML file -> JSON object (tables, arrays, strings, numbers, booleans)
json load_toml(const std::string& path);

// symbol declaration {kind, claim = {n, rho, delta}, ...params}; grid from the declaration or `fallback`
Symbol symbol_from_json(const json& decl, const GridSpec& g, const LPFamily& fam);
GridSpec grid_from_json(const json& decl, const GridSpec& fallback);

ExperimentResult run_experiment(ExperimentConfig& cfg);

// JSON report to `out` ("-" or empty: stdout); CSV when out ends in .csv and the result has rows
void emit(const ExperimentResult& r, const std::string& out);

} // namespace ncpdo
