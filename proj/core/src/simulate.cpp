#include "ergoloop/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace ergoloop {

namespace {

void init_agent_state(Agent& a, const Vec& value) {
    struct Visitor {
        const Vec& value;
        void operator()(AffineAgent& ag) const {
            if (value.size() != ag.state_dim())
                throw DimensionError("initial state dimension does not match agent");
            ag.x = value;
        }
        void operator()(LipschitzAgent& ag) const {
            if (value.size() != ag.state_dim())
                throw DimensionError("initial state dimension does not match agent");
            ag.x = value;
        }
        void operator()(DiscreteAgent& ag) const {
            if (value.size() != 1) throw DimensionError("discrete agent takes a single state index");
            const double v = std::round(value[0]);
            if (v < 0 || v >= static_cast<double>(ag.n_states))
                throw std::invalid_argument("initial state index outside the state set");
            ag.state = static_cast<std::uint32_t>(v);
        }
    };
    std::visit(Visitor{value}, a);
}

std::size_t agent_state_dim(const Agent& a) {
    struct Visitor {
        std::size_t operator()(const AffineAgent& ag) const { return ag.state_dim(); }
        std::size_t operator()(const LipschitzAgent& ag) const { return ag.state_dim(); }
        std::size_t operator()(const DiscreteAgent&) const { return 1; }
    };
    return std::visit(Visitor{}, a);
}

void apply_ensemble_init(Ensemble& ens, std::size_t q, const EnsembleInit& spec,
                         std::uint64_t seed, std::uint64_t run_index) {
    struct Visitor {
        Ensemble& ens;
        std::size_t q;
        std::uint64_t seed, run;

        void operator()(const InitConstant& c) const {
            for (auto& a : ens.agents) init_agent_state(a, Vec(agent_state_dim(a), c.value));
        }
        void operator()(const InitExplicit& e) const {
            if (e.states.size() != ens.agents.size())
                throw std::invalid_argument("explicit initial conditions need one state per agent");
            for (std::size_t i = 0; i < ens.agents.size(); ++i)
                init_agent_state(ens.agents[i], e.states[i]);
        }
        void operator()(const InitUniform& u) const {
            for (std::size_t i = 0; i < ens.agents.size(); ++i) {
                RandomStream rng(seed, run, agent_component_id(q, i), 0, DrawKind::agent_init);
                Vec v(agent_state_dim(ens.agents[i]));
                for (double& x : v) x = u.lo + (u.hi - u.lo) * rng.next_unit();
                if (std::holds_alternative<DiscreteAgent>(ens.agents[i]))
                    v[0] = std::floor(v[0]);  // integer state index within [lo, hi)
                init_agent_state(ens.agents[i], v);
            }
        }
        void operator()(const InitPopulationBernoulli& pb) const {
            double level = pb.q.value_or(0.0);
            if (!pb.q) {
                RandomStream pop_rng(seed, run, ensemble_component_id(q), 0,
                                     DrawKind::population_init);
                level = pop_rng.next_unit();
            }
            for (std::size_t i = 0; i < ens.agents.size(); ++i) {
                RandomStream rng(seed, run, agent_component_id(q, i), 0, DrawKind::agent_init);
                const double v = rng.next_unit() < level ? pb.high : pb.low;
                init_agent_state(ens.agents[i], Vec(agent_state_dim(ens.agents[i]), v));
            }
        }
    };
    std::visit(Visitor{ens, q, seed, run_index}, spec);
}

}  // namespace

void apply_initial_conditions(Topology& t, const InitialConditions& init, std::uint64_t seed,
                              std::uint64_t run_index) {
    if (!init.ensembles.empty() && init.ensembles.size() != t.ensembles.size())
        throw std::invalid_argument("initial conditions need one entry per ensemble");
    for (std::size_t q = 0; q < t.ensembles.size(); ++q) {
        if (init.ensembles.empty())
            apply_ensemble_init(t.ensembles[q], q, InitConstant{0.0}, seed, run_index);
        else
            apply_ensemble_init(t.ensembles[q], q, init.ensembles[q], seed, run_index);
    }
    if (!init.controller_states.empty() && init.controller_states.size() != t.controllers.size())
        throw std::invalid_argument("initial conditions need one state per controller");
    for (std::size_t c = 0; c < t.controllers.size(); ++c)
        t.controllers[c].reset(init.controller_states.empty() ? Vec(t.controllers[c].state_dim(), 0.0)
                                                              : init.controller_states[c]);
    if (!init.filter_states.empty() && init.filter_states.size() != t.filters.size())
        throw std::invalid_argument("initial conditions need one state per filter");
    for (std::size_t f = 0; f < t.filters.size(); ++f)
        t.filters[f].reset(init.filter_states.empty() ? Vec(t.filters[f].state_dim(), 0.0)
                                                      : init.filter_states[f]);
    t.initialize_signals();
}

std::vector<std::string> trajectory_columns(const Topology& t, RecordGranularity g) {
    std::vector<std::string> cols{"k"};
    for (std::size_t c = 0; c < t.controllers.size(); ++c)
        cols.push_back("pi_" + std::to_string(c + 1));
    for (std::size_t e = 0; e < t.error_count(); ++e) cols.push_back("e_" + std::to_string(e + 1));
    for (std::size_t q = 0; q < t.ensembles.size(); ++q)
        cols.push_back("y_ens" + std::to_string(q + 1));
    for (std::size_t f = 0; f < t.filters.size(); ++f)
        cols.push_back("yhat_" + std::to_string(f + 1));
    if (g == RecordGranularity::per_agent)
        for (std::size_t q = 0; q < t.ensembles.size(); ++q)
            for (std::size_t i = 0; i < t.ensembles[q].agents.size(); ++i)
                cols.push_back("y_ens" + std::to_string(q + 1) + "_agent" + std::to_string(i + 1));
    return cols;
}

std::size_t TrajectoryRecord::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw std::invalid_argument("unknown signal name: " + std::string(name));
}

Vec TrajectoryRecord::column(std::string_view name) const {
    const std::size_t idx = column_index(name);
    Vec v;
    v.reserve(steps.size());
    for (const auto& row : steps) v.push_back(row[idx]);
    return v;
}

TrajectoryRecord run(const Scenario& s, std::uint64_t run_index) {
    const auto t_start = std::chrono::steady_clock::now();
    if (s.horizon == 0) throw std::invalid_argument("horizon must be >= 1");
    Topology topo = s.topology;
    topo.validate();
    apply_initial_conditions(topo, s.init, s.base_seed, run_index);

    TrajectoryRecord rec;
    rec.columns = trajectory_columns(topo, s.granularity);
    rec.steps.reserve(s.horizon);
    rec.meta.base_seed = s.base_seed;
    rec.meta.run_index = run_index;
    rec.meta.scenario_hash = s.scenario_hash;

    StepContext ctx;
    ctx.seed = s.base_seed;
    ctx.run = run_index;
    ctx.pi_clamp_events = &rec.meta.pi_clamp_events;
    const bool per_agent = s.granularity == RecordGranularity::per_agent;

    for (std::size_t k = 0; k < s.horizon; ++k) {
        ctx.step = k;
        StepRecord step = step_topology(topo, k, ctx, per_agent);
        Vec row;
        row.reserve(rec.columns.size());
        row.push_back(static_cast<double>(k));
        row.insert(row.end(), step.pi.begin(), step.pi.end());
        row.insert(row.end(), step.e.begin(), step.e.end());
        row.insert(row.end(), step.y.begin(), step.y.end());
        row.insert(row.end(), step.y_hat.begin(), step.y_hat.end());
        if (per_agent)
            for (const auto& ya : step.per_agent) row.insert(row.end(), ya.begin(), ya.end());
        rec.steps.push_back(std::move(row));
    }
    rec.meta.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
            .count();
    return rec;
}

std::vector<RunOutcome> run_batch(const Scenario& s, std::size_t n_runs, std::size_t workers) {
    if (n_runs == 0) throw std::invalid_argument("n_runs must be >= 1");
    std::vector<RunOutcome> outcomes(n_runs);
    const std::size_t n_workers = std::max<std::size_t>(1, std::min(workers, n_runs));

    auto work = [&](std::atomic<std::size_t>& next) {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_runs) return;
            try {
                outcomes[i].record = run(s, i);
            } catch (const std::exception& ex) {
                outcomes[i].error = ex.what();
            }
        }
    };

    if (n_workers == 1) {
        std::atomic<std::size_t> next{0};
        work(next);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back([&] { work(next); });
        for (auto& th : pool) th.join();
    }
    return outcomes;
}

std::vector<TrajectoryRecord> run_batch_strict(const Scenario& s, std::size_t n_runs,
                                               std::size_t workers) {
    auto outcomes = run_batch(s, n_runs, workers);
    std::vector<TrajectoryRecord> records;
    records.reserve(n_runs);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (!outcomes[i].record)
            throw std::runtime_error("run " + std::to_string(i) + " failed: " + outcomes[i].error);
        records.push_back(std::move(*outcomes[i].record));
    }
    return records;
}

SummaryTable summarize(const std::vector<TrajectoryRecord>& records) {
    if (records.empty()) throw std::invalid_argument("summarize needs at least one record");
    const std::size_t horizon = records.front().steps.size();
    const auto& cols = records.front().columns;
    for (const auto& r : records) {
        if (r.steps.size() != horizon)
            throw std::invalid_argument("summarize: records have mismatched horizons");
        if (r.columns != cols)
            throw std::invalid_argument("summarize: records have mismatched columns");
    }

    SummaryTable table;
    table.columns.push_back("k");
    for (std::size_t c = 1; c < cols.size(); ++c) table.columns.push_back("mean_" + cols[c]);
    for (std::size_t c = 1; c < cols.size(); ++c) table.columns.push_back("std_" + cols[c]);

    const double n = static_cast<double>(records.size());
    table.steps.reserve(horizon);
    for (std::size_t k = 0; k < horizon; ++k) {
        Vec row;
        row.reserve(table.columns.size());
        row.push_back(static_cast<double>(k));
        for (std::size_t c = 1; c < cols.size(); ++c) {
            double mean = 0.0;
            for (const auto& r : records) mean += r.steps[k][c];
            mean /= n;
            row.push_back(mean);
        }
        for (std::size_t c = 1; c < cols.size(); ++c) {
            double var = 0.0;
            if (records.size() > 1) {
                const double mean = row[c];
                for (const auto& r : records) {
                    const double d = r.steps[k][c] - mean;
                    var += d * d;
                }
                var /= (n - 1.0);
            }
            row.push_back(std::sqrt(var));
        }
        table.steps.push_back(std::move(row));
    }
    return table;
}

}  // namespace ergoloop
