#pragma once

#include <cstdint>
#include <span>

namespace ergoloop {

/// Draw kinds keep the substreams of one component disjoint, so e.g. adding
/// output branches never perturbs the transition trajectory.
enum class DrawKind : std::uint64_t {
    transition_branch = 1,
    output_branch = 2,
    agent_init = 3,
    population_init = 4,
    component_init = 5,
};

/// Counter-based random stream keyed by (seed, run, component, step, kind).
///
/// Every key tuple owns an independent substream, so draws are reproducible
/// regardless of execution order, worker count, or which other components
/// exist. One splitmix64-style avalanche per output word.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t run, std::uint64_t component, std::uint64_t step,
                 DrawKind kind)
        : key_(absorb(absorb(absorb(absorb(mix(seed ^ 0x243F6A8885A308D3ull), run), component),
                             step),
                      static_cast<std::uint64_t>(kind))) {}

    /// Uniform double in [0, 1).
    double next_unit() {
        const std::uint64_t r = mix(key_ + (counter_++) * 0x9E3779B97F4A7C15ull);
        return static_cast<double>(r >> 11) * 0x1.0p-53;
    }

    /// Index drawn from the discrete distribution `probs` (assumed to sum to 1).
    std::size_t pick(std::span<const double> probs) {
        double u = next_unit();
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            if (u < probs[i]) return i;
            u -= probs[i];
        }
        return probs.empty() ? 0 : probs.size() - 1;
    }

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    static std::uint64_t absorb(std::uint64_t state, std::uint64_t word) {
        return mix(state ^ word);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Stable component ids for keying rng substreams.
inline std::uint64_t agent_component_id(std::size_t ensemble_idx, std::size_t agent_idx) {
    return (1ull << 40) | (static_cast<std::uint64_t>(ensemble_idx) << 24) | agent_idx;
}
inline std::uint64_t ensemble_component_id(std::size_t ensemble_idx) {
    return (2ull << 40) | ensemble_idx;
}
inline std::uint64_t controller_component_id(std::size_t idx) { return (3ull << 40) | idx; }
inline std::uint64_t filter_component_id(std::size_t idx) { return (4ull << 40) | idx; }

}  // namespace ergoloop
