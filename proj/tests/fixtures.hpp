#pragma once

#include <random>

#include "ergoloop/simulate.hpp"
#include "ergoloop/topology.hpp"
#include "helpers.hpp"

namespace ergotest {

using namespace ergoloop;

inline ProbabilityFunction constant_prob(double v, double floor = 0.0) {
    return {ConstantProb{v}, floor};
}
inline ProbabilityFunction logistic_prob(double mid, double slope, double floor) {
    return {LogisticProb{mid, slope}, floor};
}

/// Memoryless advertising agent: x(k+1) in {high, low} at the logistic
/// probability of the current signal, y = x.
inline AffineAgent advertising_agent(double mid, double slope, double floor = 0.05) {
    AffineAgent a;
    a.A = Matrix::scalar(0.0);
    a.c = {1.0};
    a.b_choices = {{1.0}, {0.0}};
    a.b_probs = {logistic_prob(mid, slope, floor), logistic_prob(mid, -slope, floor)};
    a.d_choices = {0.0};
    a.d_probs = {constant_prob(1.0)};
    a.x = {0.0};
    return a;
}

/// Scalar-state agent with stochastic b and d branches and Schur margin 0.5.
inline AffineAgent stochastic_linear_agent(double mid, double floor = 0.1) {
    AffineAgent a;
    a.A = Matrix::scalar(0.5);
    a.c = {1.0};
    a.b_choices = {{0.1}, {0.6}};
    a.b_probs = {logistic_prob(mid, 0.8, floor), logistic_prob(mid, -0.8, floor)};
    a.d_choices = {0.0, 0.5};
    a.d_probs = {logistic_prob(mid, -0.6, floor), logistic_prob(mid, 0.6, floor)};
    a.x = {0.0};
    return a;
}

inline Ensemble replicate(const AffineAgent& proto, std::size_t n) {
    Ensemble e;
    e.agents.assign(n, Agent{proto});
    return e;
}

/// Certified two-sided linear wiring: every block Schur with margin >= 0.05,
/// every probability floor >= the given value.
inline Topology certified_two_sided(std::size_t n1 = 4, std::size_t n2 = 4, double floor = 0.1) {
    Topology t;
    t.kind = TopologyKind::two_sided;
    t.ensembles = {replicate(stochastic_linear_agent(1.0, floor), n1),
                   replicate(stochastic_linear_agent(-1.0, floor), n2)};
    LinearBlock c1 = build_lag(0.2, 0.2, 0.5);
    LinearBlock c2 = build_lag(0.1, 0.2, 0.4);
    c1.name = "controller1";
    c2.name = "controller2";
    t.controllers = {c1, c2};
    LinearBlock f1 = make_delay_filter();
    LinearBlock f2 = make_delay_filter();
    f1.name = "filter1";
    f2.name = "filter2";
    t.filters = {f1, f2};
    t.u = {ExternalInput{{2.0}}, ExternalInput{{1.0}}};
    t.signal_ranges = {SignalRange{-8.0, 8.0}, SignalRange{-8.0, 8.0}};
    t.pi_initial = {0.0, 0.0};
    return t;
}

/// Small toy-1 wiring with the recurrence controllers.
inline Topology small_toy1(std::size_t n1 = 5, std::size_t n2 = 10, double u = 12.0) {
    Topology t;
    t.kind = TopologyKind::toy1;
    t.ensembles = {replicate(advertising_agent(2.0, 0.7), n1),
                   replicate(advertising_agent(6.0, 0.18), n2)};
    t.controllers = {realize_toy_controller(-4.01, 0.99, 0.1, 40),
                     realize_toy_controller(-4.01, 0.99, 0.1, 20)};
    t.controllers[0].name = "controller1";
    t.controllers[1].name = "controller2";
    t.u = {ExternalInput{{u}}};
    t.signal_ranges = {SignalRange{0.0, 40.0}, SignalRange{0.0, 40.0}};
    t.pi_initial = {0.0, 0.0};
    return t;
}

// Random Schur block of dimension 1..max_dim.
inline Matrix random_schur_block(std::mt19937_64& gen, std::size_t max_dim,
                                 double radius_lo = 0.1, double radius_hi = 0.8) {
    std::uniform_int_distribution<std::size_t> dim(1, max_dim);
    std::uniform_real_distribution<double> radius(radius_lo, radius_hi);
    return random_matrix_with_radius(gen, dim(gen), radius(gen));
}

inline AffineAgent random_affine_agent(std::mt19937_64& gen, std::size_t max_dim) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    AffineAgent a;
    a.A = random_schur_block(gen, max_dim);
    const std::size_t n = a.A.rows();
    a.c.resize(n);
    for (double& v : a.c) v = dist(gen);
    a.b_choices = {Vec(n, 0.0), Vec(n, 0.0)};
    for (auto& b : a.b_choices)
        for (double& v : b) v = dist(gen);
    a.b_probs = {logistic_prob(0.0, 0.5, 0.1), logistic_prob(0.0, -0.5, 0.1)};
    a.d_choices = {0.0, dist(gen)};
    a.d_probs = {constant_prob(0.5, 0.1), constant_prob(0.5, 0.1)};
    a.x = Vec(n, 0.0);
    return a;
}

inline LinearBlock random_siso_block(std::mt19937_64& gen, std::size_t max_dim,
                                     const std::string& name) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    LinearBlock b;
    b.A = random_schur_block(gen, max_dim);
    const std::size_t n = b.A.rows();
    b.B = Matrix(n, 1);
    for (std::size_t i = 0; i < n; ++i) b.B(i, 0) = dist(gen);
    b.C = Matrix(1, n);
    for (std::size_t i = 0; i < n; ++i) b.C(0, i) = dist(gen);
    b.D = Matrix::scalar(dist(gen));
    b.x = Vec(n, 0.0);
    b.held_output = {0.0};
    b.name = name;
    return b;
}

/// Random topology of the requested kind with scalar-to-max_dim blocks;
/// used by the spectrum-union property suites.
inline Topology random_topology(std::mt19937_64& gen, TopologyKind kind, std::size_t max_dim = 4) {
    std::uniform_int_distribution<std::size_t> count(1, 4);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Topology t;
    t.kind = kind;
    const std::size_t n_ens =
        kind == TopologyKind::multi_sided ? std::max<std::size_t>(2, count(gen)) : 2;
    for (std::size_t q = 0; q < n_ens; ++q) {
        Ensemble e;
        const std::size_t n_agents = count(gen);
        for (std::size_t i = 0; i < n_agents; ++i)
            e.agents.push_back(Agent{random_affine_agent(gen, max_dim)});
        t.ensembles.push_back(std::move(e));
    }
    const std::size_t n_ctrl = kind == TopologyKind::toy2 ? 1 : n_ens;
    for (std::size_t c = 0; c < n_ctrl; ++c)
        t.controllers.push_back(random_siso_block(gen, max_dim, "controller" + std::to_string(c + 1)));
    if (kind == TopologyKind::two_sided || kind == TopologyKind::multi_sided) {
        for (std::size_t f = 0; f < n_ens; ++f)
            t.filters.push_back(random_siso_block(gen, max_dim, "filter" + std::to_string(f + 1)));
    }
    if (kind == TopologyKind::multi_sided) {
        Matrix h(n_ens, n_ens);
        for (std::size_t i = 0; i < n_ens; ++i)
            for (std::size_t j = 0; j < n_ens; ++j) h(i, j) = dist(gen);
        t.H = h;
    }
    const std::size_t n_u = (kind == TopologyKind::toy1 || kind == TopologyKind::toy2) ? 1 : n_ens;
    for (std::size_t i = 0; i < n_u; ++i) t.u.push_back(ExternalInput{{dist(gen)}});
    t.signal_ranges.assign(n_ctrl, SignalRange{-1e6, 1e6});
    t.pi_initial.assign(n_ctrl, 0.0);
    return t;
}

}  // namespace ergotest
