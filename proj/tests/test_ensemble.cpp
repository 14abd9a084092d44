#include <cmath>
#include <random>

#include "doctest.h"
#include "ergoloop/agent.hpp"
#include "ergoloop/spectral.hpp"

using namespace ergoloop;

namespace {

ProbabilityFunction constant_prob(double v, double floor = 0.0) {
    return {ConstantProb{v}, floor};
}
ProbabilityFunction logistic_prob(double mid, double slope, double floor) {
    return {LogisticProb{mid, slope}, floor};
}

AffineAgent bernoulli_driver(double p_floor = 0.05) {
    // x(k+1) = b with b in {1, 0}; y = x. The advertising-state template.
    AffineAgent a;
    a.A = Matrix::scalar(0.0);
    a.c = {1.0};
    a.b_choices = {{1.0}, {0.0}};
    a.b_probs = {logistic_prob(5.0, 1.0, p_floor), logistic_prob(5.0, -1.0, p_floor)};
    a.d_choices = {0.0};
    a.d_probs = {constant_prob(1.0)};
    a.x = {0.0};
    return a;
}

}  // namespace

TEST_CASE("branch probabilities: constants, singletons, logistic symmetry") {
    const std::vector<ProbabilityFunction> two{constant_prob(0.3, 0.01), constant_prob(0.7, 0.01)};
    const auto p = branch_probabilities(two, -3.0);
    CHECK(p[0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(0.7).epsilon(1e-14));

    const std::vector<ProbabilityFunction> one{logistic_prob(0.0, 2.0, 0.1)};
    CHECK(branch_probabilities(one, 12.0) == std::vector<double>{1.0});

    const std::vector<ProbabilityFunction> pair{logistic_prob(5.0, 1.0, 0.05),
                                                logistic_prob(5.0, -1.0, 0.05)};
    const auto q = branch_probabilities(pair, 5.0);
    CHECK(q[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(q[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("probabilities stay on the floored simplex on a dense grid") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> pdist(0.0, 1.0);
    std::vector<std::vector<ProbabilityFunction>> agents;
    agents.push_back({logistic_prob(5.0, 1.0, 0.05), logistic_prob(5.0, -1.0, 0.05)});
    agents.push_back({constant_prob(0.9, 0.2), constant_prob(0.05, 0.2), constant_prob(0.3, 0.2)});
    agents.push_back({{PiecewiseLinearProb{{{0.0, 0.0}, {5.0, 1.0}, {10.0, 0.2}}}, 0.1},
                      logistic_prob(2.0, -0.5, 0.1)});
    for (const auto& branches : agents) {
        for (int g = 0; g < 1000; ++g) {
            const double pi = 20.0 * pdist(gen) - 5.0;
            const auto p = branch_probabilities(branches, pi);
            double sum = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                CHECK(p[i] >= branches[i].floor - 1e-15);
                CHECK(p[i] <= 1.0 + 1e-15);
                sum += p[i];
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("floors that cannot coexist are rejected") {
    std::vector<ProbabilityFunction> bad{constant_prob(0.5, 0.6), constant_prob(0.5, 0.6)};
    CHECK_THROWS_AS(validate_branch_floors(bad), std::invalid_argument);
}

TEST_CASE("sample_transition: deterministic branches") {
    AffineAgent a;
    a.A = Matrix::scalar(0.0);
    a.c = {1.0};
    a.b_choices = {{2.0}};
    a.b_probs = {constant_prob(1.0)};
    a.d_choices = {0.0};
    a.d_probs = {constant_prob(1.0)};
    a.x = {-7.5};
    Agent agent = a;
    RandomStream rng(0, 0, 0, 0, DrawKind::transition_branch);
    sample_transition(agent, 0.0, rng);
    CHECK(std::get<AffineAgent>(agent).x[0] == 2.0);

    // Two branches at probabilities (1, 0): branch 1 always taken.
    AffineAgent b = a;
    b.b_choices = {{3.0}, {9.0}};
    b.b_probs = {constant_prob(1.0, 0.0), constant_prob(0.0, 0.0)};
    for (int i = 0; i < 50; ++i) {
        Agent ag = b;
        RandomStream r(11, 0, 0, static_cast<std::uint64_t>(i), DrawKind::transition_branch);
        sample_transition(ag, 0.0, r);
        CHECK(std::get<AffineAgent>(ag).x[0] == 3.0);
    }
}

TEST_CASE("sample_transition: empirical branch frequency at (0.5, 0.5)") {
    AffineAgent proto = bernoulli_driver();
    const int n = 100000;
    int branch_one = 0;
    for (int i = 0; i < n; ++i) {
        Agent ag = proto;
        RandomStream r(2024, 0, 0, static_cast<std::uint64_t>(i), DrawKind::transition_branch);
        sample_transition(ag, 5.0, r);  // logistic midpoint: exactly (0.5, 0.5)
        if (std::get<AffineAgent>(ag).x[0] == 1.0) ++branch_one;
    }
    // binomial 3 sigma at n = 1e5 is about 0.0047
    CHECK(static_cast<double>(branch_one) / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(static_cast<double>(branch_one) / n - 0.5) <= 0.005);
}

TEST_CASE("sample_output: affine read-out and Monte-Carlo mean") {
    AffineAgent a;
    a.A = Matrix::scalar(0.5);
    a.c = {1.0};
    a.b_choices = {{0.0}};
    a.b_probs = {constant_prob(1.0)};
    a.d_choices = {0.5};
    a.d_probs = {constant_prob(1.0)};
    a.x = {3.0};
    Agent agent = a;
    RandomStream rng(0, 0, 0, 0, DrawKind::output_branch);
    CHECK(sample_output(agent, 0.0, rng) == doctest::Approx(3.5));

    // Two output branches d in {0, 1} at probabilities (0.25, 0.75).
    AffineAgent b = a;
    b.x = {0.0};
    b.d_choices = {0.0, 1.0};
    b.d_probs = {constant_prob(0.25, 0.0), constant_prob(0.75, 0.0)};
    Agent bag = b;
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        RandomStream r(77, 0, 0, static_cast<std::uint64_t>(i), DrawKind::output_branch);
        sum += sample_output(bag, 0.0, r);
    }
    CHECK(std::abs(sum / n - 0.75) <= 0.005);
}

TEST_CASE("transition and output draws use disjoint substreams") {
    // Changing the output branch structure must not perturb the state
    // trajectory driven by the transition draws.
    AffineAgent one = bernoulli_driver();
    AffineAgent two = bernoulli_driver();
    two.d_choices = {0.0, 5.0, 9.0};
    two.d_probs = {constant_prob(0.2, 0.01), constant_prob(0.5, 0.01), constant_prob(0.3, 0.01)};

    Ensemble e1{{Agent{one}}};
    Ensemble e2{{Agent{two}}};
    StepContext ctx{123, 0, 0, nullptr};
    for (std::size_t k = 0; k < 200; ++k) {
        ctx.step = k;
        (void)ensemble_output(e1, 0, 5.0, ctx);
        (void)ensemble_output(e2, 0, 5.0, ctx);
        ensemble_transition(e1, 0, 5.0, ctx);
        ensemble_transition(e2, 0, 5.0, ctx);
        CHECK(std::get<AffineAgent>(e1.agents[0]).x ==
              std::get<AffineAgent>(e2.agents[0]).x);
    }
}

TEST_CASE("ensemble output aggregates per-agent outputs") {
    AffineAgent unit;
    unit.A = Matrix::scalar(0.0);
    unit.c = {0.0};
    unit.b_choices = {{0.0}};
    unit.b_probs = {constant_prob(1.0)};
    unit.d_choices = {1.0};
    unit.d_probs = {constant_prob(1.0)};
    unit.x = {0.0};
    Ensemble e;
    e.agents.assign(3, Agent{unit});
    StepContext ctx{0, 0, 0, nullptr};
    const auto out = ensemble_output(e, 0, 0.0, ctx);
    CHECK(out.total == 3.0);
    CHECK(out.per_agent == std::vector<double>{1.0, 1.0, 1.0});

    // All agents output zero.
    AffineAgent zero = unit;
    zero.d_choices = {0.0};
    Ensemble ez;
    ez.agents.assign(4, Agent{zero});
    CHECK(ensemble_output(ez, 0, 0.0, ctx).total == 0.0);
}

TEST_CASE("50 Bernoulli-output agents at p = 0.4 average near 20") {
    AffineAgent a;
    a.A = Matrix::scalar(0.0);
    a.c = {0.0};
    a.b_choices = {{0.0}};
    a.b_probs = {constant_prob(1.0)};
    a.d_choices = {1.0, 0.0};
    a.d_probs = {constant_prob(0.4, 0.0), constant_prob(0.6, 0.0)};
    a.x = {0.0};
    Ensemble e;
    e.agents.assign(50, Agent{a});
    StepContext ctx{314, 0, 0, nullptr};
    double sum = 0.0;
    const int steps = 10000;
    for (int k = 0; k < steps; ++k) {
        ctx.step = static_cast<std::size_t>(k);
        sum += ensemble_output(e, 0, 0.0, ctx).total;
    }
    CHECK(std::abs(sum / steps - 20.0) <= 0.5);
}

TEST_CASE("affine contraction: trajectories under identical branch sequences converge") {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix A{{0.4, 0.2}, {-0.1, 0.5}};
    REQUIRE(is_schur(A).verdict);
    Vec x1{1.0, -2.0};
    Vec x2{-0.5, 3.0};
    const Vec x0_diff = vec_sub(x1, x2);
    Matrix power = Matrix::identity(2);
    for (int k = 0; k < 40; ++k) {
        power = power * A;
        // identical offsets cancel in the difference
        const Vec b{dist(gen), dist(gen)};
        x1 = vec_add(matvec(A, x1), b);
        x2 = vec_add(matvec(A, x2), b);
        const double lhs = norm2(vec_sub(x1, x2));
        const double rhs = induced_norm2(power) * norm2(x0_diff);
        CHECK(lhs <= rhs + 1e-12);
    }
}

TEST_CASE("declared Lipschitz constants bound empirical ratios") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    std::vector<LipschitzMap> maps;
    maps.push_back(make_lipschitz_map(AffineMap{Matrix{{0.3, 0.4}, {0.0, 0.6}}, {1.0, -1.0}}));
    maps.push_back(make_lipschitz_map(
        SaturatedAffineMap{Matrix{{0.7, -0.2}, {0.3, 0.1}}, {0.0, 0.5}, -1.0, 1.0}));
    maps.push_back(make_lipschitz_map(TanhMap{0.8, 1.5, {0.0, 0.0}}));
    std::vector<OutputMap> outs;
    outs.push_back(make_output_map(AffineFunctional{{0.5, -0.25}, 2.0}));
    outs.push_back(make_output_map(TanhFunctional{{1.0, 1.0}, 0.5, 2.0, 0.0}));

    for (int rep = 0; rep < 10000; ++rep) {
        const Vec x{dist(gen), dist(gen)};
        const Vec y{dist(gen), dist(gen)};
        const double dxy = norm2(vec_sub(x, y));
        for (const auto& m : maps)
            CHECK(norm2(vec_sub(m.apply(x), m.apply(y))) <= m.lipschitz * dxy + 1e-9);
        for (const auto& o : outs)
            CHECK(std::abs(o.apply(x) - o.apply(y)) <= o.lipschitz * dxy + 1e-9);
    }
}

TEST_CASE("agent_graph edge rules") {
    DiscreteAgent identity_only;
    identity_only.n_states = 3;
    identity_only.transition_maps = {{0, 1, 2}};
    identity_only.transition_probs = {constant_prob(1.0)};
    identity_only.output_values = {0.0, 1.0, 2.0};
    const auto g1 = agent_graph(identity_only);
    for (std::size_t s = 0; s < 3; ++s)
        for (std::size_t t = 0; t < 3; ++t) CHECK(g1.has_edge(s, t) == (s == t));

    DiscreteAgent swap_only;
    swap_only.n_states = 2;
    swap_only.transition_maps = {{1, 0}};
    swap_only.transition_probs = {constant_prob(1.0)};
    swap_only.output_values = {0.0, 1.0};
    const auto g2 = agent_graph(swap_only);
    CHECK(g2.has_edge(0, 1));
    CHECK(g2.has_edge(1, 0));
    CHECK_FALSE(g2.has_edge(0, 0));

    // Both maps with positive floors: enumerating swap and identity at both
    // states gives the complete digraph with self-loops.
    DiscreteAgent both;
    both.n_states = 2;
    both.transition_maps = {{1, 0}, {0, 1}};
    both.transition_probs = {constant_prob(0.5, 0.1), constant_prob(0.5, 0.1)};
    both.output_values = {0.0, 1.0};
    const auto g3 = agent_graph(both);
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t t = 0; t < 2; ++t) CHECK(g3.has_edge(s, t));

    // A zero-floor branch contributes no edges.
    DiscreteAgent zero_floor = both;
    zero_floor.transition_probs = {constant_prob(0.5, 0.1), constant_prob(0.5, 0.0)};
    const auto g4 = agent_graph(zero_floor);
    CHECK(g4.has_edge(0, 1));
    CHECK_FALSE(g4.has_edge(0, 0));
}

TEST_CASE("ensembles must be homogeneous") {
    AffineAgent a = bernoulli_driver();
    DiscreteAgent d;
    d.n_states = 2;
    d.transition_maps = {{1, 0}};
    d.transition_probs = {constant_prob(1.0)};
    d.output_values = {0.0, 1.0};
    Ensemble e;
    e.agents = {Agent{a}, Agent{d}};
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
}
