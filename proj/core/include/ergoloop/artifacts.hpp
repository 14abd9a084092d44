#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "ergoloop/certify.hpp"
#include "ergoloop/diagnostics.hpp"
#include "ergoloop/simulate.hpp"

namespace ergoloop {

/// Trajectory CSV: header row, one row per step, floats at 17 significant
/// digits so values round-trip exactly.
void write_trajectory_csv(const std::string& path, const TrajectoryRecord& record);

void write_summary_csv(const std::string& path, const SummaryTable& table);

std::string format_csv_double(double v);

nlohmann::json certification_report_to_json(const CertificationReport& report);
nlohmann::json ergodicity_report_to_json(const ErgodicityReport& report);
nlohmann::json oracle_comparison_to_json(const OracleComparison& cmp);

void write_json_file(const std::string& path, const nlohmann::json& doc);

/// Output directory layout of one CLI invocation:
///   trajectories/run_<i>.csv, summary.csv, ergodicity_report.json,
///   certification_report.json, manifest.json
struct RunManifest {
    std::string out_dir;
    std::string tool_version;
    std::string config_hash;
    std::uint64_t base_seed = 0;
    std::size_t runs = 0;
    std::size_t horizon = 0;
    std::size_t workers = 1;
    std::string granularity;
    std::string scenario_name;
    nlohmann::json overrides = nlohmann::json::object();
    std::vector<std::string> artifacts;
    std::string created_utc;  // only timestamps live here, never in data files
};

void write_manifest(const RunManifest& manifest);

std::string utc_timestamp_now();

}  // namespace ergoloop
