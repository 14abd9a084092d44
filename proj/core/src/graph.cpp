#include "ergoloop/graph.hpp"

#include <numeric>
#include <vector>

namespace ergoloop {

namespace {

// Nodes reachable from `start`, following edges forward (or reversed).
std::vector<std::uint8_t> reachable(const AdjacencyMatrix& g, std::size_t start, bool reversed) {
    std::vector<std::uint8_t> seen(g.n, 0);
    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < g.n; ++v) {
            const bool edge = reversed ? g.has_edge(v, u) : g.has_edge(u, v);
            if (edge && !seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
        }
    }
    return seen;
}

}  // namespace

bool is_strongly_connected(const AdjacencyMatrix& g) {
    if (g.n == 0) return false;
    const auto fwd = reachable(g, 0, false);
    const auto bwd = reachable(g, 0, true);
    for (std::size_t v = 0; v < g.n; ++v)
        if (!fwd[v] || !bwd[v]) return false;
    return true;
}

std::size_t graph_period(const AdjacencyMatrix& g) {
    // BFS levels from node 0; the period is the gcd of level[u] + 1 - level[v]
    // over all edges u -> v between visited nodes.
    std::vector<long long> level(g.n, -1);
    std::vector<std::size_t> queue{0};
    level[0] = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        const std::size_t u = queue[qi];
        for (std::size_t v = 0; v < g.n; ++v) {
            if (!g.has_edge(u, v)) continue;
            if (level[v] < 0) {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    long long period = 0;
    for (std::size_t u = 0; u < g.n; ++u) {
        if (level[u] < 0) continue;
        for (std::size_t v = 0; v < g.n; ++v) {
            if (!g.has_edge(u, v) || level[v] < 0) continue;
            const long long d = level[u] + 1 - level[v];
            period = std::gcd(period, d < 0 ? -d : d);
        }
    }
    return static_cast<std::size_t>(period);
}

bool is_primitive(const AdjacencyMatrix& g) {
    if (g.n == 0) return false;
    return is_strongly_connected(g) && graph_period(g) == 1;
}

}  // namespace ergoloop
