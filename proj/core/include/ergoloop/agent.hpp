#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ergoloop/graph.hpp"
#include "ergoloop/matrix.hpp"
#include "ergoloop/probability.hpp"
#include "ergoloop/rng.hpp"

namespace ergoloop {

struct SignalRange {
    double lo = -1e9;
    double hi = 1e9;

    double clamp(double pi, bool* clamped = nullptr) const;
};

/// Affine stochastic participant: x(k+1) = A x(k) + b, y(k) = c^T x(k) + d,
/// with b and d drawn per step from finite choice sets whose selection
/// probabilities depend on the broadcast signal.
struct AffineAgent {
    Matrix A;
    Vec c;
    std::vector<Vec> b_choices;
    std::vector<ProbabilityFunction> b_probs;
    std::vector<double> d_choices;
    std::vector<ProbabilityFunction> d_probs;
    Vec x;

    void validate() const;
    std::size_t state_dim() const { return A.rows(); }
};

// Closed library of Lipschitz transition maps with analytically known
// constants; arbitrary code is not accepted so declared constants stay honest.
struct AffineMap {
    Matrix M;
    Vec b;
};
struct SaturatedAffineMap {  // clamp(M x + b, lo, hi) elementwise
    Matrix M;
    Vec b;
    double lo;
    double hi;
};
struct TanhMap {  // gain * tanh(x_i / scale) + b_i elementwise
    double gain;
    double scale;
    Vec b;
};
using LipschitzMapKind = std::variant<AffineMap, SaturatedAffineMap, TanhMap>;

struct LipschitzMap {
    LipschitzMapKind map;
    double lipschitz = 0.0;  // computed from the map parameters at construction

    Vec apply(const Vec& x) const;
};

// Scalar-valued output maps with known constants.
struct AffineFunctional {  // c^T x + d
    Vec c;
    double d;
};
struct TanhFunctional {  // gain * tanh(c^T x / scale) + d
    Vec c;
    double gain;
    double scale;
    double d;
};
using OutputMapKind = std::variant<AffineFunctional, TanhFunctional>;

struct OutputMap {
    OutputMapKind map;
    double lipschitz = 0.0;

    double apply(const Vec& x) const;
};

double lipschitz_constant(const LipschitzMapKind& map);
double lipschitz_constant(const OutputMapKind& map);
LipschitzMap make_lipschitz_map(LipschitzMapKind map);
OutputMap make_output_map(OutputMapKind map);

/// Nonlinear participant built from the closed map library above.
struct LipschitzAgent {
    std::vector<LipschitzMap> transition_maps;
    std::vector<ProbabilityFunction> transition_probs;
    std::vector<OutputMap> output_maps;
    std::vector<ProbabilityFunction> output_probs;
    Vec x;

    void validate() const;
    std::size_t state_dim() const { return x.size(); }
};

/// Finite-state participant: total transition maps over a finite state set,
/// one demand value per state.
struct DiscreteAgent {
    std::size_t n_states = 0;
    std::vector<std::vector<std::uint32_t>> transition_maps;  // each maps state -> state
    std::vector<ProbabilityFunction> transition_probs;
    std::vector<double> output_values;  // demand per state
    std::uint32_t state = 0;

    static constexpr std::size_t max_states = 65536;

    void validate() const;
};

using Agent = std::variant<AffineAgent, LipschitzAgent, DiscreteAgent>;

enum class AgentKind { affine, lipschitz, discrete };
AgentKind agent_kind(const Agent& a);

/// Homogeneous population of one agent kind.
struct Ensemble {
    std::vector<Agent> agents;

    std::size_t size() const { return agents.size(); }
    AgentKind kind() const;
    void validate() const;
};

/// Holds the rng keying context plus the run log for one global tick.
struct StepContext {
    std::uint64_t seed = 0;
    std::uint64_t run = 0;
    std::size_t step = 0;
    std::size_t* pi_clamp_events = nullptr;  // optional counter for out-of-range signals
};

std::vector<double> transition_probabilities(const Agent& a, double pi);
std::vector<double> output_probabilities(const Agent& a, double pi);

/// Draws a transition branch at probability p_j(pi) and replaces the agent's
/// state with the selected map's image.
void sample_transition(Agent& a, double pi, RandomStream& rng);

/// Draws an output branch at probability p'_l(pi) and returns the selected
/// output map evaluated at the current state. Independent of the transition draw.
double sample_output(const Agent& a, double pi, RandomStream& rng);

struct EnsembleOutput {
    double total = 0.0;
    std::vector<double> per_agent;
};

/// Sum of per-agent sampled outputs; each agent uses its own rng substream.
EnsembleOutput ensemble_output(const Ensemble& e, std::size_t ensemble_idx, double pi,
                               const StepContext& ctx);

void ensemble_transition(Ensemble& e, std::size_t ensemble_idx, double pi, const StepContext& ctx);

/// Directed graph on the agent's states: edge (s, s') iff some transition map
/// with an everywhere-positive branch probability (floor > 0) sends s to s'.
AdjacencyMatrix agent_graph(const DiscreteAgent& a);

}  // namespace ergoloop
