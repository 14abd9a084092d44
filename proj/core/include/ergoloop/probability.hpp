#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "ergoloop/matrix.hpp"

namespace ergoloop {

struct ConstantProb {
    double value;
};

/// floor + (1 - 2*floor) / (1 + exp(-slope * (pi - midpoint))).
/// Negative slope gives the mirrored (decreasing) curve.
struct LogisticProb {
    double midpoint;
    double slope;
};

/// Linear interpolation through sorted (pi, value) points, held flat outside.
struct PiecewiseLinearProb {
    std::vector<std::pair<double, double>> points;
};

/// One branch's selection-probability curve over the signal domain, with the
/// positive floor the ergodicity conditions require.
struct ProbabilityFunction {
    std::variant<ConstantProb, LogisticProb, PiecewiseLinearProb> family;
    double floor = 0.0;  // delta in (0, 1); 0 allowed only for deliberately broken scenarios

    /// Family value at pi, clamped into [floor, 1].
    double raw(double pi) const;
};

/// Per-branch probabilities at signal value pi: each branch's curve is
/// evaluated, clamped to [floor_i, 1], and the vector is renormalized onto the
/// simplex without dropping any entry below its floor. Single-branch lists
/// always return {1}.
std::vector<double> branch_probabilities(const std::vector<ProbabilityFunction>& branches,
                                         double pi);

/// Validates that the branch floors can coexist on the simplex
/// (sum of floors <= 1); throws std::invalid_argument otherwise.
void validate_branch_floors(const std::vector<ProbabilityFunction>& branches);

}  // namespace ergoloop
