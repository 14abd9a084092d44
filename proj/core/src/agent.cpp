#include "ergoloop/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ergoloop/spectral.hpp"

namespace ergoloop {

double SignalRange::clamp(double pi, bool* clamped) const {
    if (pi < lo) {
        if (clamped) *clamped = true;
        return lo;
    }
    if (pi > hi) {
        if (clamped) *clamped = true;
        return hi;
    }
    if (clamped) *clamped = false;
    return pi;
}

void AffineAgent::validate() const {
    if (!A.square()) throw DimensionError("agent A must be square");
    A.require_finite("agent A");
    if (c.size() != A.rows()) throw DimensionError("agent c dimension does not match A");
    if (x.size() != A.rows()) throw DimensionError("agent state dimension does not match A");
    if (b_choices.empty() || d_choices.empty())
        throw std::invalid_argument("agent needs at least one b choice and one d choice");
    if (b_choices.size() != b_probs.size() || d_choices.size() != d_probs.size())
        throw std::invalid_argument("each choice needs exactly one probability function");
    for (const auto& b : b_choices)
        if (b.size() != A.rows()) throw DimensionError("agent b choice dimension does not match A");
    validate_branch_floors(b_probs);
    validate_branch_floors(d_probs);
}

Vec LipschitzMap::apply(const Vec& x) const {
    struct Visitor {
        const Vec& x;
        Vec operator()(const AffineMap& m) const { return vec_add(matvec(m.M, x), m.b); }
        Vec operator()(const SaturatedAffineMap& m) const {
            Vec y = vec_add(matvec(m.M, x), m.b);
            for (double& v : y) v = std::clamp(v, m.lo, m.hi);
            return y;
        }
        Vec operator()(const TanhMap& m) const {
            Vec y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                y[i] = m.gain * std::tanh(x[i] / m.scale) + m.b[i];
            return y;
        }
    };
    return std::visit(Visitor{x}, map);
}

double OutputMap::apply(const Vec& x) const {
    struct Visitor {
        const Vec& x;
        double operator()(const AffineFunctional& m) const { return dot(m.c, x) + m.d; }
        double operator()(const TanhFunctional& m) const {
            return m.gain * std::tanh(dot(m.c, x) / m.scale) + m.d;
        }
    };
    return std::visit(Visitor{x}, map);
}

double lipschitz_constant(const LipschitzMapKind& map) {
    struct Visitor {
        double operator()(const AffineMap& m) const { return induced_norm2(m.M); }
        double operator()(const SaturatedAffineMap& m) const { return induced_norm2(m.M); }
        double operator()(const TanhMap& m) const { return std::abs(m.gain) / std::abs(m.scale); }
    };
    return std::visit(Visitor{}, map);
}

double lipschitz_constant(const OutputMapKind& map) {
    struct Visitor {
        double operator()(const AffineFunctional& m) const { return norm2(m.c); }
        double operator()(const TanhFunctional& m) const {
            return std::abs(m.gain) * norm2(m.c) / std::abs(m.scale);
        }
    };
    return std::visit(Visitor{}, map);
}

LipschitzMap make_lipschitz_map(LipschitzMapKind map) {
    LipschitzMap m{std::move(map), 0.0};
    m.lipschitz = lipschitz_constant(m.map);
    return m;
}

OutputMap make_output_map(OutputMapKind map) {
    OutputMap m{std::move(map), 0.0};
    m.lipschitz = lipschitz_constant(m.map);
    return m;
}

void LipschitzAgent::validate() const {
    if (transition_maps.empty() || output_maps.empty())
        throw std::invalid_argument("agent needs at least one transition and one output map");
    if (transition_maps.size() != transition_probs.size() ||
        output_maps.size() != output_probs.size())
        throw std::invalid_argument("each map needs exactly one probability function");
    validate_branch_floors(transition_probs);
    validate_branch_floors(output_probs);
}

void DiscreteAgent::validate() const {
    if (n_states == 0) throw std::invalid_argument("discrete agent needs at least one state");
    if (n_states > max_states)
        throw std::invalid_argument("discrete agent exceeds the state bound of " +
                                    std::to_string(max_states));
    if (transition_maps.empty()) throw std::invalid_argument("discrete agent needs transition maps");
    if (transition_maps.size() != transition_probs.size())
        throw std::invalid_argument("each transition map needs exactly one probability function");
    for (const auto& map : transition_maps) {
        if (map.size() != n_states)
            throw std::invalid_argument("transition map is not total on the state set");
        for (auto s : map)
            if (s >= n_states) throw std::invalid_argument("transition map leaves the state set");
    }
    if (output_values.size() != n_states)
        throw std::invalid_argument("output map is not total on the state set");
    if (state >= n_states) throw std::invalid_argument("agent state outside the state set");
    validate_branch_floors(transition_probs);
}

AgentKind agent_kind(const Agent& a) {
    if (std::holds_alternative<AffineAgent>(a)) return AgentKind::affine;
    if (std::holds_alternative<LipschitzAgent>(a)) return AgentKind::lipschitz;
    return AgentKind::discrete;
}

AgentKind Ensemble::kind() const {
    if (agents.empty()) throw std::invalid_argument("ensemble must contain at least one agent");
    return agent_kind(agents.front());
}

void Ensemble::validate() const {
    if (agents.empty()) throw std::invalid_argument("ensemble must contain at least one agent");
    const AgentKind k = agent_kind(agents.front());
    for (const auto& a : agents) {
        if (agent_kind(a) != k)
            throw std::invalid_argument("ensemble must be homogeneous in agent kind");
        std::visit([](const auto& ag) { ag.validate(); }, a);
    }
}

std::vector<double> transition_probabilities(const Agent& a, double pi) {
    struct Visitor {
        double pi;
        std::vector<double> operator()(const AffineAgent& ag) const {
            return branch_probabilities(ag.b_probs, pi);
        }
        std::vector<double> operator()(const LipschitzAgent& ag) const {
            return branch_probabilities(ag.transition_probs, pi);
        }
        std::vector<double> operator()(const DiscreteAgent& ag) const {
            return branch_probabilities(ag.transition_probs, pi);
        }
    };
    return std::visit(Visitor{pi}, a);
}

std::vector<double> output_probabilities(const Agent& a, double pi) {
    struct Visitor {
        double pi;
        std::vector<double> operator()(const AffineAgent& ag) const {
            return branch_probabilities(ag.d_probs, pi);
        }
        std::vector<double> operator()(const LipschitzAgent& ag) const {
            return branch_probabilities(ag.output_probs, pi);
        }
        std::vector<double> operator()(const DiscreteAgent&) const {
            return {1.0};  // single deterministic output map
        }
    };
    return std::visit(Visitor{pi}, a);
}

void sample_transition(Agent& a, double pi, RandomStream& rng) {
    const auto probs = transition_probabilities(a, pi);
    const std::size_t j = rng.pick(probs);
    struct Visitor {
        std::size_t j;
        void operator()(AffineAgent& ag) const { ag.x = vec_add(matvec(ag.A, ag.x), ag.b_choices[j]); }
        void operator()(LipschitzAgent& ag) const { ag.x = ag.transition_maps[j].apply(ag.x); }
        void operator()(DiscreteAgent& ag) const { ag.state = ag.transition_maps[j][ag.state]; }
    };
    std::visit(Visitor{j}, a);
}

double sample_output(const Agent& a, double pi, RandomStream& rng) {
    const auto probs = output_probabilities(a, pi);
    const std::size_t l = rng.pick(probs);
    struct Visitor {
        std::size_t l;
        double operator()(const AffineAgent& ag) const {
            return dot(ag.c, ag.x) + ag.d_choices[l];
        }
        double operator()(const LipschitzAgent& ag) const { return ag.output_maps[l].apply(ag.x); }
        double operator()(const DiscreteAgent& ag) const { return ag.output_values[ag.state]; }
    };
    return std::visit(Visitor{l}, a);
}

EnsembleOutput ensemble_output(const Ensemble& e, std::size_t ensemble_idx, double pi,
                               const StepContext& ctx) {
    EnsembleOutput out;
    out.per_agent.reserve(e.agents.size());
    for (std::size_t i = 0; i < e.agents.size(); ++i) {
        RandomStream rng(ctx.seed, ctx.run, agent_component_id(ensemble_idx, i), ctx.step,
                         DrawKind::output_branch);
        const double y = sample_output(e.agents[i], pi, rng);
        out.per_agent.push_back(y);
        out.total += y;
    }
    return out;
}

void ensemble_transition(Ensemble& e, std::size_t ensemble_idx, double pi, const StepContext& ctx) {
    for (std::size_t i = 0; i < e.agents.size(); ++i) {
        RandomStream rng(ctx.seed, ctx.run, agent_component_id(ensemble_idx, i), ctx.step,
                         DrawKind::transition_branch);
        sample_transition(e.agents[i], pi, rng);
    }
}

AdjacencyMatrix agent_graph(const DiscreteAgent& a) {
    AdjacencyMatrix g(a.n_states);
    const bool singleton = a.transition_maps.size() == 1;  // sole branch has probability 1
    for (std::size_t j = 0; j < a.transition_maps.size(); ++j) {
        if (!singleton && a.transition_probs[j].floor <= 0.0) continue;
        for (std::size_t s = 0; s < a.n_states; ++s) g.add_edge(s, a.transition_maps[j][s]);
    }
    return g;
}

}  // namespace ergoloop
