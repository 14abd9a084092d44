#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ergoloop/simulate.hpp"

namespace ergoloop {

/// A validated scenario plus the run and diagnostics parameters that ride
/// along in the config document.
struct LoadedScenario {
    Scenario scenario;
    std::size_t runs = 1;
    std::size_t workers = 1;
    // diagnostics section
    std::optional<std::size_t> burn_in;
    double tolerance = 0.02;
    std::size_t runs_per_ic = 5;
    std::vector<InitialConditions> diag_initial_conditions;
    std::optional<double> feasibility_r;

    std::string config_hash;    // stable hash of the normalized document
    nlohmann::json normalized;  // the validated document (sorted keys)
};

/// Parses and schema-validates a scenario document. Unknown keys are rejected;
/// every error carries a JSON-pointer-style path.
LoadedScenario parse_scenario(const nlohmann::json& j, const std::string& name_hint);

LoadedScenario load_scenario_file(const std::string& path);

/// Serializes a loaded scenario back to a document that re-validates to the
/// same scenario (round trip).
nlohmann::json scenario_to_json(const LoadedScenario& s);

/// FNV-1a 64-bit over a string; stable across platforms and runs.
std::string stable_hash(const std::string& text);

}  // namespace ergoloop
