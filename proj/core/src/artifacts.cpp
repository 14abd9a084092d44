#include "ergoloop/artifacts.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace ergoloop {

std::string format_csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    return out;
}

void write_rows(std::ofstream& out, const std::vector<std::string>& columns,
                const std::vector<Vec>& steps) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out << ',';
        out << columns[c];
    }
    out << '\n';
    for (const auto& row : steps) {
        out << static_cast<long long>(row[0]);  // step index
        for (std::size_t c = 1; c < row.size(); ++c) out << ',' << format_csv_double(row[c]);
        out << '\n';
    }
}

}  // namespace

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& record) {
    auto out = open_out(path);
    write_rows(out, record.columns, record.steps);
}

void write_summary_csv(const std::string& path, const SummaryTable& table) {
    auto out = open_out(path);
    write_rows(out, table.columns, table.steps);
}

nlohmann::json certification_report_to_json(const CertificationReport& report) {
    nlohmann::json j;
    j["verdict"] = to_string(report.verdict);
    j["applicable_theorem"] = report.applicable_theorem;
    if (!report.note.empty()) j["note"] = report.note;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : report.checks) {
        nlohmann::json jc;
        jc["name"] = c.name;
        jc["component"] = c.component;
        jc["result"] = c.passed ? "pass" : "fail";
        jc["hypothesis"] = c.hypothesis;
        jc["detail"] = c.detail;
        if (c.informational) jc["informational"] = true;
        checks.push_back(std::move(jc));
    }
    j["checks"] = std::move(checks);
    return j;
}

nlohmann::json ergodicity_report_to_json(const ErgodicityReport& report) {
    nlohmann::json j;
    j["verdict"] = report.verdict;
    j["tolerance"] = report.tolerance;
    j["max_discrepancy"] = report.max_discrepancy;
    j["max_discrepancy_allowance"] = report.max_discrepancy_allowance;
    if (!report.max_discrepancy_pair.empty())
        j["max_discrepancy_pair"] = report.max_discrepancy_pair;
    j["burn_in"] = report.burn_in;
    j["runs_per_ic"] = report.runs_per_ic;
    j["per_agent_averages"] = report.per_agent_averages;
    j["per_agent_standard_errors"] = report.per_agent_standard_errors;
    nlohmann::json ks = nlohmann::json::array();
    for (const auto& entry : report.ks_stats) {
        ks.push_back({{"ic_a", entry.ic_a},
                      {"ic_b", entry.ic_b},
                      {"stat", entry.stat},
                      {"critical", entry.critical}});
    }
    j["ks_stats"] = std::move(ks);
    if (!report.failures.empty()) j["failures"] = report.failures;
    return j;
}

nlohmann::json oracle_comparison_to_json(const OracleComparison& cmp) {
    nlohmann::json j;
    j["exact_expectation"] = cmp.exact_expectation;
    j["stationary_residual"] = cmp.stationary_residual;
    j["seeds"] = cmp.seeds;
    j["cesaro"] = cmp.cesaro;
    j["abs_error"] = cmp.abs_error;
    j["tolerance"] = cmp.tolerance;
    j["pass"] = cmp.pass;
    return j;
}

void write_json_file(const std::string& path, const nlohmann::json& doc) {
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

void write_manifest(const RunManifest& manifest) {
    nlohmann::json j;
    j["tool_version"] = manifest.tool_version;
    j["config_hash"] = manifest.config_hash;
    j["base_seed"] = manifest.base_seed;
    j["runs"] = manifest.runs;
    j["horizon"] = manifest.horizon;
    j["workers"] = manifest.workers;
    j["record_granularity"] = manifest.granularity;
    j["scenario"] = manifest.scenario_name;
    j["overrides"] = manifest.overrides;
    j["artifacts"] = manifest.artifacts;
    j["created_utc"] = manifest.created_utc;
    write_json_file(manifest.out_dir + "/manifest.json", j);
}

std::string utc_timestamp_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

}  // namespace ergoloop
