#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ergoloop/agent.hpp"
#include "ergoloop/linear_block.hpp"
#include "ergoloop/matrix.hpp"

namespace ergoloop {

enum class TopologyKind { two_sided, multi_sided, toy1, toy2 };

std::string to_string(TopologyKind k);

/// Constant external input, or a bounded time series held at its last value.
struct ExternalInput {
    std::vector<double> values{0.0};

    double at(std::size_t k) const {
        return values[k < values.size() ? k : values.size() - 1];
    }
};

/// A wired interconnection of ensembles, controllers, and filters, plus the
/// held broadcast signals. Owns all component states; copying a Topology
/// clones the whole closed loop.
struct Topology {
    TopologyKind kind = TopologyKind::toy1;
    std::vector<Ensemble> ensembles;
    std::vector<LinearBlock> controllers;
    std::vector<LinearBlock> filters;
    std::optional<Matrix> H;  // multi_sided interconnection gains H(p, q)
    std::vector<ExternalInput> u;
    std::vector<double> r;  // accepted for completeness; unused by the shipped wirings
    std::vector<SignalRange> signal_ranges;  // one per controller
    std::vector<double> pi_initial;          // held signal before the first update

    std::vector<double> pi_held;  // runtime: last emitted (clamped) signals

    void validate() const;
    void initialize_signals();
    std::size_t controller_for_ensemble(std::size_t q) const;
    std::size_t error_count() const;
};

struct BlockSpan {
    std::size_t offset = 0;
    std::size_t dim = 0;
};

/// The augmented closed-loop matrix with a name -> span index into its
/// block-lower-triangular state layout.
struct AugmentedSystem {
    Matrix A;
    std::map<std::string, BlockSpan> block_index;
    std::vector<std::string> block_order;
};

/// Assembles the augmented state matrix for the topology's wiring: ensemble
/// diagonal blocks, filter rows coupled through the aggregated output read-out,
/// controller rows coupled through the error wiring, with the sign pattern of
/// the interconnection equations. Affine ensembles only.
AugmentedSystem assemble_augmented_matrix(const Topology& t);

/// Error vector from the filtered outputs (raw aggregate outputs for the toy
/// wirings, which have no filters):
///   two_sided:  e1 = u1 - y_hat2,  e2 = u2 + y_hat1
///   toy1:       e  = u - (y1 + y2)
///   toy2:       e  = u + y2 - y1
///   multi:      e_p = u_p - sum_q H(p,q) y_hat_q
Vec wire_error_signals(const Topology& t, const Vec& filtered_outputs, std::size_t k);

struct StepRecord {
    std::size_t k = 0;
    std::vector<double> pi;
    std::vector<double> e;
    std::vector<double> y;      // per ensemble
    std::vector<double> y_hat;  // per filter
    std::vector<std::vector<double>> per_agent;  // per ensemble, when recorded
};

/// One global tick, in the fixed order: sample outputs at the held signals,
/// aggregate, step filters, wire errors, step controllers (clamping the new
/// signals to their ranges), then sample transitions at the new signals.
/// Throws SimulationError naming the first non-finite component.
StepRecord step_topology(Topology& t, std::size_t k, const StepContext& ctx,
                         bool record_per_agent = false);

/// Current augmented state in the layout of assemble_augmented_matrix.
Vec augmented_state(const Topology& t);

/// Constant part of the one-step affine update for single-branch (degenerate)
/// topologies with constant inputs; the deterministic loop then iterates
/// xi(k+1) = A xi(k) + beta.
Vec constant_offset_vector(const Topology& t);

struct OffsetSample {
    Vec beta;
    double probability;
};

/// Enumerates the offset vectors over all agents' joint (transition, output)
/// branch choices together with their selection-probability products at the
/// given signals. Returns nullopt when the combination count exceeds 2^16.
std::optional<std::vector<OffsetSample>> enumerate_offset_library(
    const Topology& t, const std::vector<double>& pi);

}  // namespace ergoloop
