#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ergoloop/topology.hpp"

namespace ergoloop {

enum class RecordGranularity { aggregate_only, per_agent };

// Initial-condition modes for one ensemble's agents.
struct InitConstant {
    double value = 0.0;
};
struct InitExplicit {
    std::vector<Vec> states;  // one per agent
};
struct InitUniform {
    double lo = 0.0;
    double hi = 1.0;
};
/// The toy experiments' randomization: one uniform(0,1) level q is drawn per
/// population per run (unless pinned), then each agent independently starts at
/// `high` with probability q, else at `low`.
struct InitPopulationBernoulli {
    double low = 0.0;
    double high = 1.0;
    std::optional<double> q;
};
using EnsembleInit = std::variant<InitConstant, InitExplicit, InitUniform, InitPopulationBernoulli>;

struct InitialConditions {
    std::string name = "default";
    std::vector<EnsembleInit> ensembles;   // one per ensemble; empty -> all zeros
    std::vector<Vec> controller_states;    // empty -> zeros
    std::vector<Vec> filter_states;        // empty -> zeros
};

struct Scenario {
    std::string name = "scenario";
    Topology topology;
    std::size_t horizon = 1;
    InitialConditions init;
    std::uint64_t base_seed = 0;
    RecordGranularity granularity = RecordGranularity::aggregate_only;
    std::string scenario_hash;  // filled by the config loader when applicable
};

/// Column-labeled trajectory; exactly one row per step.
struct TrajectoryRecord {
    std::vector<std::string> columns;
    std::vector<Vec> steps;

    struct Metadata {
        std::uint64_t base_seed = 0;
        std::uint64_t run_index = 0;
        std::string scenario_hash;
        double wall_ms = 0.0;
        std::size_t pi_clamp_events = 0;
    } meta;

    std::size_t column_index(std::string_view name) const;  // throws on unknown name
    Vec column(std::string_view name) const;
};

/// Executes one run: applies the scenario's initial conditions with the run's
/// seed substreams, then performs `horizon` global ticks. A pure function of
/// (scenario, run_index).
TrajectoryRecord run(const Scenario& s, std::uint64_t run_index);

struct RunOutcome {
    std::optional<TrajectoryRecord> record;
    std::string error;  // non-empty when the run failed
};

/// n_runs independent runs distributed over `workers` threads; element i
/// equals run(s, i) regardless of scheduling. Failed runs are reported
/// per-slot and the batch continues.
std::vector<RunOutcome> run_batch(const Scenario& s, std::size_t n_runs, std::size_t workers = 1);

/// Convenience: throws if any run in the batch failed.
std::vector<TrajectoryRecord> run_batch_strict(const Scenario& s, std::size_t n_runs,
                                               std::size_t workers = 1);

/// Per-step cross-run mean and (n-1)-denominator standard deviation per signal.
struct SummaryTable {
    std::vector<std::string> columns;  // k, mean_<col>..., std_<col>...
    std::vector<Vec> steps;
};

SummaryTable summarize(const std::vector<TrajectoryRecord>& records);

/// Applies `init` to a topology in place, drawing any sampled values from the
/// (seed, run) substreams. Exposed for the diagnostics module.
void apply_initial_conditions(Topology& t, const InitialConditions& init, std::uint64_t seed,
                              std::uint64_t run_index);

std::vector<std::string> trajectory_columns(const Topology& t, RecordGranularity g);

}  // namespace ergoloop
