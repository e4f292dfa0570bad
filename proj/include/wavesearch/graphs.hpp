#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace wavesearch::graphs {

inline constexpr std::size_t max_nodes = 8;

/// Simple undirected graph on at most 8 nodes; adjacency rows as bitmasks.
struct SmallGraph {
    std::size_t n = 0;
    std::vector<std::uint8_t> adj;

    explicit SmallGraph(std::size_t nodes = 0);

    bool has_edge(std::size_t i, std::size_t j) const { return (adj[i] >> j) & 1u; }
    void add_edge(std::size_t i, std::size_t j);
    std::size_t degree(std::size_t i) const;
    std::size_t edge_count() const;
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;  // i < j, sorted
    bool connected() const;

    friend bool operator==(const SmallGraph&, const SmallGraph&) = default;
};

/// Upper-triangle bits in graph6 column order, first pair most significant.
std::uint64_t adjacency_code(const SmallGraph& g);

struct Canonical {
    SmallGraph graph;                    // canonically relabelled
    std::vector<std::size_t> labeling;   // original vertex -> canonical position
    std::uint64_t code = 0;
    std::vector<std::size_t> orbit;      // per canonical vertex: smallest vertex in its orbit
};

/// Colour refinement from degrees, then every relabelling consistent with the
/// refined ordered partition; the minimal code wins.
Canonical canonical_form(const SmallGraph& g);

/// Canonical vertices, one per automorphism orbit (smallest label).
std::vector<std::size_t> orbit_representatives(const Canonical& c);

/// All non-isomorphic graphs on n nodes with at most max_edges edges, canonical form,
/// ordered by (edge count, code).
std::vector<SmallGraph> all_graphs(std::size_t n, std::size_t max_edges);

/// Connected subset of all_graphs with min_edges <= |E| <= max_edges.
std::vector<SmallGraph> connected_graphs(std::size_t n, std::size_t min_edges, std::size_t max_edges);

std::string to_graph6(const SmallGraph& g);
SmallGraph from_graph6(const std::string& text);

/// "0-1 0-2 1-2"
std::string edge_list_string(const SmallGraph& g);

} // namespace wavesearch::graphs
