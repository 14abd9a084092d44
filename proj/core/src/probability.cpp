#include "ergoloop/probability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ergoloop {

namespace {

double family_value(const ProbabilityFunction& f, double pi) {
    struct Visitor {
        double pi;
        double floor;
        double operator()(const ConstantProb& c) const { return c.value; }
        double operator()(const LogisticProb& l) const {
            return floor + (1.0 - 2.0 * floor) / (1.0 + std::exp(-l.slope * (pi - l.midpoint)));
        }
        double operator()(const PiecewiseLinearProb& p) const {
            const auto& pts = p.points;
            if (pts.empty()) return 0.0;
            if (pi <= pts.front().first) return pts.front().second;
            if (pi >= pts.back().first) return pts.back().second;
            for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
                if (pi <= pts[i + 1].first) {
                    const double span = pts[i + 1].first - pts[i].first;
                    const double w = span > 0.0 ? (pi - pts[i].first) / span : 0.0;
                    return pts[i].second + w * (pts[i + 1].second - pts[i].second);
                }
            }
            return pts.back().second;
        }
    };
    return std::visit(Visitor{pi, f.floor}, f.family);
}

}  // namespace

double ProbabilityFunction::raw(double pi) const {
    return std::clamp(family_value(*this, pi), floor, 1.0);
}

void validate_branch_floors(const std::vector<ProbabilityFunction>& branches) {
    double floor_sum = 0.0;
    for (const auto& b : branches) {
        if (b.floor < 0.0 || b.floor >= 1.0)
            throw std::invalid_argument("probability floor must lie in [0, 1)");
        floor_sum += b.floor;
    }
    if (floor_sum > 1.0)
        throw std::invalid_argument("branch probability floors sum to " +
                                    std::to_string(floor_sum) + " > 1; no simplex point exists");
}

std::vector<double> branch_probabilities(const std::vector<ProbabilityFunction>& branches,
                                         double pi) {
    const std::size_t n = branches.size();
    if (n == 0) throw std::invalid_argument("agent has no branches");
    if (n == 1) return {1.0};

    std::vector<double> w(n);
    double floor_sum = 0.0;
    double excess_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = branches[i].raw(pi);
        floor_sum += branches[i].floor;
        excess_sum += w[i] - branches[i].floor;
    }
    // Distribute the mass above the floors proportionally to each branch's
    // excess; this lands exactly on the simplex while keeping every entry at
    // or above its floor. When the raw values already sum to one the map is
    // the identity.
    const double spare = 1.0 - floor_sum;
    std::vector<double> p(n);
    if (excess_sum <= 0.0) {
        for (std::size_t i = 0; i < n; ++i) p[i] = branches[i].floor + spare / static_cast<double>(n);
    } else {
        for (std::size_t i = 0; i < n; ++i)
            p[i] = branches[i].floor + spare * (w[i] - branches[i].floor) / excess_sum;
    }
    return p;
}

}  // namespace ergoloop
