#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ergoloop/agent.hpp"
#include "ergoloop/matrix.hpp"
#include "ergoloop/simulate.hpp"

namespace ergoloop {

/// Arithmetic mean of the named signal over steps burn_in .. K-1.
double cesaro_average(const TrajectoryRecord& record, std::string_view signal,
                      std::size_t burn_in);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(Vec a, Vec b);

/// Asymptotic two-sample critical value at significance alpha.
double ks_critical_value(std::size_t n, std::size_t m, double alpha);

struct KsEntry {
    std::string ic_a;
    std::string ic_b;
    double stat = 0.0;
    double critical = 0.0;
};

struct ErgodicityReport {
    std::string verdict;  // consistent | inconsistent | inconclusive
    double tolerance = 0.0;
    double max_discrepancy = 0.0;
    double max_discrepancy_allowance = 0.0;  // tolerance + 3 * pooled SE at the extremal pair
    std::string max_discrepancy_pair;
    std::map<std::string, std::vector<double>> per_agent_averages;  // IC name -> flat agent averages
    std::map<std::string, std::vector<double>> per_agent_standard_errors;
    std::vector<KsEntry> ks_stats;
    std::vector<std::string> failures;
    std::size_t burn_in = 0;
    std::size_t runs_per_ic = 0;
};

struct ErgodicityOptions {
    std::size_t runs_per_ic = 5;
    double tolerance = 0.02;
    std::optional<std::size_t> burn_in;  // default: horizon / 2
    double ks_alpha = 0.01;
    std::size_t ks_blocks_per_run = 50;  // tail block means pooled per initial condition
    std::size_t workers = 1;
};

/// Runs batches from each initial condition and compares per-agent long-run
/// averages and tail output distributions across them. Consistent means every
/// pairwise average discrepancy stays within tolerance + 3 * pooled standard
/// error and every pairwise tail KS statistic stays below its critical value.
ErgodicityReport unique_ergodicity_test(const Scenario& s,
                                        const std::vector<InitialConditions>& initial_conditions,
                                        const ErgodicityOptions& options = {});

/// Steps whose total utilization exceeded the bound r (strictly).
std::vector<std::size_t> feasibility_check(const TrajectoryRecord& record, double r);

/// Row-stochastic one-step transition matrix of a discrete agent at a fixed
/// signal value: P(s, s') = sum over maps j with map_j(s) = s' of p_j(pi).
Matrix exact_transition_matrix(const DiscreteAgent& agent, double pi);

struct StationaryDistribution {
    Vec probabilities;
    double residual_l1 = 0.0;  // ||mu P - mu||_1 at the returned point
    std::size_t iterations = 0;
    std::optional<std::size_t> period;  // set when period-averaging was needed

    double expectation(const Vec& observable) const;
};

/// Fixed point of mu <- mu P from the uniform start. Periodic chains are
/// detected by oscillation and resolved by averaging the iterates over one
/// period; the result is always verified to satisfy the invariance residual.
StationaryDistribution stationary_distribution(const Matrix& P);

struct OracleComparison {
    double exact_expectation = 0.0;
    double stationary_residual = 0.0;
    std::vector<std::uint64_t> seeds;
    std::vector<double> cesaro;
    std::vector<double> abs_error;
    double tolerance = 0.0;
    bool pass = false;
};

/// Open-loop validation of the simulation engine against the exact chain:
/// a single discrete agent driven at constant pi, Monte-Carlo Cesaro averages
/// of the observable per seed versus the exact stationary expectation.
OracleComparison oracle_compare(const DiscreteAgent& agent, double pi, const Vec& observable,
                                std::size_t horizon, const std::vector<std::uint64_t>& seeds,
                                double tolerance);

}  // namespace ergoloop
