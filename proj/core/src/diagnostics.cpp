#include "ergoloop/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace ergoloop {

double cesaro_average(const TrajectoryRecord& record, std::string_view signal,
                      std::size_t burn_in) {
    if (burn_in >= record.steps.size())
        throw std::invalid_argument("burn-in must be smaller than the horizon");
    const std::size_t idx = record.column_index(signal);
    double sum = 0.0;
    for (std::size_t k = burn_in; k < record.steps.size(); ++k) sum += record.steps[k][idx];
    return sum / static_cast<double>(record.steps.size() - burn_in);
}

double ks_statistic(Vec a, Vec b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("KS statistic needs non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    return d;
}

double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
    if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("alpha must be in (0, 1)");
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    const double nn = static_cast<double>(n), mm = static_cast<double>(m);
    return c * std::sqrt((nn + mm) / (nn * mm));
}

namespace {

// Flat per-agent column names, ensemble-major, matching trajectory columns.
std::vector<std::string> agent_columns(const Topology& t) {
    std::vector<std::string> cols;
    for (std::size_t q = 0; q < t.ensembles.size(); ++q)
        for (std::size_t i = 0; i < t.ensembles[q].agents.size(); ++i)
            cols.push_back("y_ens" + std::to_string(q + 1) + "_agent" + std::to_string(i + 1));
    return cols;
}

// Tail block means of the total utilization, one pooled sample set per IC.
Vec tail_block_means(const TrajectoryRecord& rec, std::size_t burn_in, std::size_t blocks) {
    const std::size_t tail = rec.steps.size() - burn_in;
    const std::size_t block_len = std::max<std::size_t>(1, tail / blocks);
    std::vector<std::size_t> y_cols;
    for (std::size_t c = 0; c < rec.columns.size(); ++c)
        if (rec.columns[c].rfind("y_ens", 0) == 0 && rec.columns[c].find("agent") == std::string::npos)
            y_cols.push_back(c);
    Vec means;
    for (std::size_t start = burn_in; start + block_len <= rec.steps.size(); start += block_len) {
        double s = 0.0;
        for (std::size_t k = start; k < start + block_len; ++k)
            for (std::size_t c : y_cols) s += rec.steps[k][c];
        means.push_back(s / static_cast<double>(block_len));
    }
    return means;
}

}  // namespace

ErgodicityReport unique_ergodicity_test(const Scenario& s,
                                        const std::vector<InitialConditions>& initial_conditions,
                                        const ErgodicityOptions& options) {
    if (initial_conditions.size() < 2)
        throw std::invalid_argument("unique ergodicity test needs at least 2 initial conditions");
    if (options.runs_per_ic == 0) throw std::invalid_argument("runs_per_ic must be >= 1");

    ErgodicityReport report;
    report.tolerance = options.tolerance;
    report.burn_in = options.burn_in.value_or(s.horizon / 2);
    report.runs_per_ic = options.runs_per_ic;
    if (report.burn_in >= s.horizon)
        throw std::invalid_argument("burn-in must be smaller than the horizon");

    const auto agent_cols = agent_columns(s.topology);
    struct IcStats {
        std::string name;
        std::vector<double> mean;  // per agent, across runs
        std::vector<double> se;    // per agent standard error of the mean
        Vec tail_samples;
    };
    std::vector<IcStats> stats;

    for (const auto& ic : initial_conditions) {
        Scenario variant = s;
        variant.init = ic;
        variant.granularity = RecordGranularity::per_agent;
        auto outcomes = run_batch(variant, options.runs_per_ic, options.workers);

        IcStats st;
        st.name = ic.name;
        std::vector<Vec> per_run_avgs;
        for (std::size_t r = 0; r < outcomes.size(); ++r) {
            if (!outcomes[r].record) {
                report.failures.push_back("ic '" + ic.name + "' run " + std::to_string(r) + ": " +
                                          outcomes[r].error);
                continue;
            }
            const auto& rec = *outcomes[r].record;
            Vec avgs;
            avgs.reserve(agent_cols.size());
            for (const auto& col : agent_cols)
                avgs.push_back(cesaro_average(rec, col, report.burn_in));
            per_run_avgs.push_back(std::move(avgs));
            const Vec blocks = tail_block_means(rec, report.burn_in, options.ks_blocks_per_run);
            st.tail_samples.insert(st.tail_samples.end(), blocks.begin(), blocks.end());
        }
        if (per_run_avgs.empty()) {
            report.verdict = "inconclusive";
            continue;
        }
        const double n = static_cast<double>(per_run_avgs.size());
        st.mean.assign(agent_cols.size(), 0.0);
        st.se.assign(agent_cols.size(), 0.0);
        for (const auto& avgs : per_run_avgs)
            for (std::size_t a = 0; a < avgs.size(); ++a) st.mean[a] += avgs[a];
        for (double& m : st.mean) m /= n;
        if (per_run_avgs.size() > 1) {
            for (const auto& avgs : per_run_avgs)
                for (std::size_t a = 0; a < avgs.size(); ++a) {
                    const double d = avgs[a] - st.mean[a];
                    st.se[a] += d * d;
                }
            for (double& v : st.se) v = std::sqrt(v / (n - 1.0) / n);
        }
        report.per_agent_averages[st.name] = st.mean;
        report.per_agent_standard_errors[st.name] = st.se;
        stats.push_back(std::move(st));
    }

    if (!report.failures.empty()) {
        report.verdict = "inconclusive";
        return report;
    }

    bool consistent = true;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        for (std::size_t j = i + 1; j < stats.size(); ++j) {
            for (std::size_t a = 0; a < agent_cols.size(); ++a) {
                const double d = std::abs(stats[i].mean[a] - stats[j].mean[a]);
                const double pooled =
                    std::sqrt(stats[i].se[a] * stats[i].se[a] + stats[j].se[a] * stats[j].se[a]);
                const double allowed = options.tolerance + 3.0 * pooled;
                if (d > report.max_discrepancy) {
                    report.max_discrepancy = d;
                    report.max_discrepancy_allowance = allowed;
                    report.max_discrepancy_pair =
                        stats[i].name + " vs " + stats[j].name + " (" + agent_cols[a] + ")";
                }
                if (d > allowed) consistent = false;
            }
            KsEntry ks;
            ks.ic_a = stats[i].name;
            ks.ic_b = stats[j].name;
            ks.stat = ks_statistic(stats[i].tail_samples, stats[j].tail_samples);
            ks.critical = ks_critical_value(stats[i].tail_samples.size(),
                                            stats[j].tail_samples.size(), options.ks_alpha);
            if (ks.stat > ks.critical) consistent = false;
            report.ks_stats.push_back(ks);
        }
    }
    report.verdict = consistent ? "consistent" : "inconsistent";
    return report;
}

std::vector<std::size_t> feasibility_check(const TrajectoryRecord& record, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("feasibility bound r must be positive");
    std::vector<std::size_t> y_cols;
    for (std::size_t c = 0; c < record.columns.size(); ++c)
        if (record.columns[c].rfind("y_ens", 0) == 0 &&
            record.columns[c].find("agent") == std::string::npos)
            y_cols.push_back(c);
    std::vector<std::size_t> violations;
    for (std::size_t k = 0; k < record.steps.size(); ++k) {
        double total = 0.0;
        for (std::size_t c : y_cols) total += record.steps[k][c];
        if (total > r) violations.push_back(k);
    }
    return violations;
}

constexpr std::size_t exact_oracle_state_bound = 4096;

Matrix exact_transition_matrix(const DiscreteAgent& agent, double pi) {
    agent.validate();
    const std::size_t n = agent.n_states;
    if (n > exact_oracle_state_bound)
        throw std::invalid_argument("state count " + std::to_string(n) +
                                    " exceeds the exact-oracle bound of " +
                                    std::to_string(exact_oracle_state_bound) +
                                    "; use Monte-Carlo estimates instead");
    const auto probs = branch_probabilities(agent.transition_probs, pi);
    Matrix P(n, n);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t j = 0; j < agent.transition_maps.size(); ++j)
            P(s, agent.transition_maps[j][s]) += probs[j];
    return P;
}

double StationaryDistribution::expectation(const Vec& observable) const {
    if (observable.size() != probabilities.size())
        throw DimensionError("observable dimension does not match the state count");
    return dot(probabilities, observable);
}

namespace {

double l1_distance(const Vec& a, const Vec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

Vec left_multiply(const Vec& mu, const Matrix& P) {
    Vec out(mu.size(), 0.0);
    for (std::size_t s = 0; s < mu.size(); ++s) {
        const double m = mu[s];
        if (m == 0.0) continue;
        for (std::size_t t = 0; t < mu.size(); ++t) out[t] += m * P(s, t);
    }
    return out;
}

}  // namespace

StationaryDistribution stationary_distribution(const Matrix& P) {
    if (!P.square()) throw DimensionError("transition matrix must be square");
    const std::size_t n = P.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (P(i, j) < -1e-12) throw std::invalid_argument("transition matrix has negative entries");
            row += P(i, j);
        }
        if (std::abs(row - 1.0) > 1e-9)
            throw std::invalid_argument("transition matrix row " + std::to_string(i) +
                                        " sums to " + std::to_string(row) + ", expected 1");
    }

    constexpr double step_tol = 1e-13;
    constexpr double residual_tol = 1e-12;
    constexpr std::size_t max_iterations = 1000000;
    const std::size_t history_cap = std::min<std::size_t>(n + 1, 256);

    StationaryDistribution result;
    Vec mu(n, 1.0 / static_cast<double>(n));
    std::deque<Vec> history{mu};

    for (std::size_t it = 1; it <= max_iterations; ++it) {
        Vec next = left_multiply(mu, P);
        if (l1_distance(next, mu) <= step_tol) {
            result.probabilities = next;
            result.iterations = it;
            result.residual_l1 = l1_distance(left_multiply(next, P), next);
            if (result.residual_l1 > residual_tol)
                throw std::runtime_error("stationary iteration converged to a non-invariant point");
            return result;
        }
        // Oscillation: the iterate returned to an earlier point. Average one
        // full cycle; the cycle average of a periodic orbit is invariant.
        for (std::size_t p = 2; p <= history.size(); ++p) {
            if (l1_distance(next, history[history.size() - p]) <= step_tol) {
                Vec avg(n, 0.0);
                for (std::size_t q = 0; q < p; ++q) {
                    const Vec& h = history[history.size() - 1 - q];
                    for (std::size_t s = 0; s < n; ++s) avg[s] += h[s];
                }
                for (double& v : avg) v /= static_cast<double>(p);
                result.probabilities = avg;
                result.iterations = it;
                result.period = p;
                result.residual_l1 = l1_distance(left_multiply(avg, P), avg);
                if (result.residual_l1 > residual_tol)
                    throw std::runtime_error(
                        "period-averaged iterate is not invariant; chain is not resolvable");
                return result;
            }
        }
        history.push_back(next);
        if (history.size() > history_cap) history.pop_front();
        mu = std::move(next);
    }
    throw std::runtime_error("stationary distribution iteration did not converge");
}

OracleComparison oracle_compare(const DiscreteAgent& agent, double pi, const Vec& observable,
                                std::size_t horizon, const std::vector<std::uint64_t>& seeds,
                                double tolerance) {
    if (observable.size() != agent.n_states)
        throw DimensionError("observable needs one value per state");
    if (horizon == 0) throw std::invalid_argument("horizon must be >= 1");

    const Matrix P = exact_transition_matrix(agent, pi);
    const StationaryDistribution sd = stationary_distribution(P);

    OracleComparison cmp;
    cmp.exact_expectation = sd.expectation(observable);
    cmp.stationary_residual = sd.residual_l1;
    cmp.seeds = seeds;
    cmp.tolerance = tolerance;
    cmp.pass = true;

    const auto probs = branch_probabilities(agent.transition_probs, pi);
    for (const auto seed : seeds) {
        std::uint32_t state = agent.state;
        double sum = 0.0;
        for (std::size_t k = 0; k < horizon; ++k) {
            sum += observable[state];
            RandomStream rng(seed, 0, agent_component_id(0, 0), k, DrawKind::transition_branch);
            state = agent.transition_maps[rng.pick(probs)][state];
        }
        const double cesaro = sum / static_cast<double>(horizon);
        cmp.cesaro.push_back(cesaro);
        const double err = std::abs(cesaro - cmp.exact_expectation);
        cmp.abs_error.push_back(err);
        if (err > tolerance) cmp.pass = false;
    }
    return cmp;
}

}  // namespace ergoloop
