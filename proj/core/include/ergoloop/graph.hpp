#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ergoloop {

/// Boolean adjacency matrix of a directed graph on n nodes.
struct AdjacencyMatrix {
    explicit AdjacencyMatrix(std::size_t n_) : n(n_), edges(n_ * n_, 0) {}

    std::size_t n;
    std::vector<std::uint8_t> edges;  // row-major, edges[i*n+j] != 0 iff i -> j

    bool has_edge(std::size_t i, std::size_t j) const { return edges[i * n + j] != 0; }
    void add_edge(std::size_t i, std::size_t j) { edges[i * n + j] = 1; }
};

/// True iff every node reaches every node along directed edges.
bool is_strongly_connected(const AdjacencyMatrix& g);

/// True iff some boolean power g^k is entrywise positive with
/// k <= (n-1)^2 + 1 (the Wielandt bound). Computed as strong connectivity
/// plus period one, which is equivalent and scales to product graphs.
bool is_primitive(const AdjacencyMatrix& g);

/// gcd of all directed cycle lengths, per strongly connected graph.
/// Returns 0 for graphs with no cycles reachable from node 0.
std::size_t graph_period(const AdjacencyMatrix& g);

}  // namespace ergoloop
