#include "wavesearch/graphs.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <set>

#include "wavesearch/error.hpp"

namespace wavesearch::graphs {

namespace {

const char* const kModule = "optimize";

void check_size(std::size_t n) {
    if (n > max_nodes)
        throw Error(ErrorKind::guard, kModule,
                    "graph enumeration is limited to n <= 8 (combinatorial guard)");
}

// Equitable colour refinement; colours are ranks of (colour, neighbour colour multiset).
std::vector<std::size_t> refine(const SmallGraph& g) {
    const std::size_t n = g.n;
    std::vector<std::size_t> colour(n);
    for (std::size_t i = 0; i < n; ++i) colour[i] = g.degree(i);
    for (;;) {
        std::vector<std::vector<std::size_t>> sig(n);
        for (std::size_t i = 0; i < n; ++i) {
            sig[i].push_back(colour[i]);
            std::vector<std::size_t> nb;
            for (std::size_t j = 0; j < n; ++j)
                if (g.has_edge(i, j)) nb.push_back(colour[j]);
            std::sort(nb.begin(), nb.end());
            sig[i].insert(sig[i].end(), nb.begin(), nb.end());
        }
        std::vector<std::vector<std::size_t>> distinct(sig.begin(), sig.end());
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        std::vector<std::size_t> next(n);
        for (std::size_t i = 0; i < n; ++i)
            next[i] = static_cast<std::size_t>(
                std::lower_bound(distinct.begin(), distinct.end(), sig[i]) - distinct.begin());
        const auto count = [](const std::vector<std::size_t>& c) {
            return std::set<std::size_t>(c.begin(), c.end()).size();
        };
        if (count(next) == count(colour)) return next;
        colour = std::move(next);
    }
}

SmallGraph relabel(const SmallGraph& g, const std::vector<std::size_t>& pos) {
    SmallGraph out(g.n);
    for (auto [i, j] : g.edges()) out.add_edge(pos[i], pos[j]);
    return out;
}

} // namespace

SmallGraph::SmallGraph(std::size_t nodes) : n(nodes), adj(nodes, 0) { check_size(nodes); }

void SmallGraph::add_edge(std::size_t i, std::size_t j) {
    if (i == j || i >= n || j >= n) throw Error(ErrorKind::validation, kModule, "invalid edge");
    adj[i] |= static_cast<std::uint8_t>(1u << j);
    adj[j] |= static_cast<std::uint8_t>(1u << i);
}

std::size_t SmallGraph::degree(std::size_t i) const {
    return static_cast<std::size_t>(std::popcount(static_cast<unsigned>(adj[i])));
}

std::size_t SmallGraph::edge_count() const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < n; ++i) s += degree(i);
    return s / 2;
}

std::vector<std::pair<std::size_t, std::size_t>> SmallGraph::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (has_edge(i, j)) out.emplace_back(i, j);
    return out;
}

bool SmallGraph::connected() const {
    if (n == 0) return false;
    unsigned seen = 1u, frontier = 1u;
    while (frontier) {
        unsigned next = 0;
        for (std::size_t i = 0; i < n; ++i)
            if ((frontier >> i) & 1u) next |= adj[i];
        frontier = next & ~seen;
        seen |= next;
    }
    return seen == (1u << n) - 1u;
}

std::uint64_t adjacency_code(const SmallGraph& g) {
    std::uint64_t code = 0;
    for (std::size_t j = 1; j < g.n; ++j)
        for (std::size_t i = 0; i < j; ++i) code = (code << 1) | (g.has_edge(i, j) ? 1u : 0u);
    return code;
}

Canonical canonical_form(const SmallGraph& g) {
    const std::size_t n = g.n;
    const auto colour = refine(g);

    // Ordered cells by colour rank; a labelling assigns cell members to consecutive slots.
    std::map<std::size_t, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < n; ++i) cells[colour[i]].push_back(i);
    std::vector<std::vector<std::size_t>> order;
    for (auto& [c, members] : cells) order.push_back(members);

    Canonical best;
    bool have = false;
    std::vector<std::vector<std::size_t>> optimal;  // all labellings reaching the minimum

    std::vector<std::vector<std::size_t>> perm = order;
    for (auto& p : perm) std::sort(p.begin(), p.end());
    for (;;) {
        std::vector<std::size_t> pos(n);
        std::size_t slot = 0;
        for (const auto& cell : perm)
            for (auto v : cell) pos[v] = slot++;
        const auto candidate = relabel(g, pos);
        const auto code = adjacency_code(candidate);
        if (!have || code < best.code) {
            best.graph = candidate;
            best.labeling = pos;
            best.code = code;
            have = true;
            optimal.clear();
        }
        if (code == best.code) optimal.push_back(pos);

        // Odometer over the per-cell permutations.
        std::size_t c = 0;
        while (c < perm.size() && !std::next_permutation(perm[c].begin(), perm[c].end())) ++c;
        if (c == perm.size()) break;
    }
    if (!have) {
        best.graph = SmallGraph(n);
        best.code = 0;
    }

    // Two optimal labellings differ by an automorphism of the canonical graph.
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    const auto& first = optimal.empty() ? best.labeling : optimal.front();
    for (const auto& pos : optimal) {
        for (std::size_t v = 0; v < n; ++v) {
            const std::size_t a = find(first[v]), b = find(pos[v]);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    }
    best.orbit.resize(n);
    for (std::size_t v = 0; v < n; ++v) best.orbit[v] = find(v);
    return best;
}

std::vector<std::size_t> orbit_representatives(const Canonical& c) {
    std::vector<std::size_t> reps;
    for (std::size_t v = 0; v < c.orbit.size(); ++v)
        if (c.orbit[v] == v) reps.push_back(v);
    return reps;
}

std::vector<SmallGraph> all_graphs(std::size_t n, std::size_t max_edges) {
    check_size(n);
    std::vector<SmallGraph> out;
    std::vector<SmallGraph> level{canonical_form(SmallGraph(n)).graph};
    const std::size_t pairs = n * (n - (n > 0 ? 1 : 0)) / 2;
    for (std::size_t e = 0;; ++e) {
        for (const auto& g : level) out.push_back(g);
        if (e >= max_edges || e >= pairs) break;
        std::map<std::uint64_t, SmallGraph> next;
        for (const auto& g : level) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    if (g.has_edge(i, j)) continue;
                    SmallGraph h = g;
                    h.add_edge(i, j);
                    auto c = canonical_form(h);
                    next.emplace(c.code, std::move(c.graph));
                }
            }
        }
        level.clear();
        for (auto& [code, g] : next) level.push_back(std::move(g));
    }
    return out;
}

std::vector<SmallGraph> connected_graphs(std::size_t n, std::size_t min_edges, std::size_t max_edges) {
    std::vector<SmallGraph> out;
    for (auto& g : all_graphs(n, max_edges))
        if (g.edge_count() >= min_edges && g.connected()) out.push_back(std::move(g));
    return out;
}

std::string to_graph6(const SmallGraph& g) {
    std::string s(1, static_cast<char>(63 + g.n));
    unsigned acc = 0;
    int bits = 0;
    for (std::size_t j = 1; j < g.n; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            acc = (acc << 1) | (g.has_edge(i, j) ? 1u : 0u);
            if (++bits == 6) {
                s.push_back(static_cast<char>(63 + acc));
                acc = 0;
                bits = 0;
            }
        }
    }
    if (bits > 0) s.push_back(static_cast<char>(63 + (acc << (6 - bits))));
    return s;
}

SmallGraph from_graph6(const std::string& text) {
    if (text.empty()) throw Error(ErrorKind::validation, kModule, "empty graph6 string");
    const int n = text[0] - 63;
    if (n < 0 || n > static_cast<int>(max_nodes))
        throw Error(ErrorKind::validation, kModule, "graph6 size out of range");
    SmallGraph g(static_cast<std::size_t>(n));
    std::size_t bit = 0;
    for (std::size_t j = 1; j < g.n; ++j) {
        for (std::size_t i = 0; i < j; ++i, ++bit) {
            const std::size_t byte = 1 + bit / 6;
            if (byte >= text.size()) throw Error(ErrorKind::validation, kModule, "graph6 string too short");
            const int v = text[byte] - 63;
            if ((v >> (5 - bit % 6)) & 1) g.add_edge(i, j);
        }
    }
    return g;
}

std::string edge_list_string(const SmallGraph& g) {
    std::string s;
    for (auto [i, j] : g.edges()) {
        if (!s.empty()) s += ' ';
        s += std::to_string(i) + "-" + std::to_string(j);
    }
    return s;
}

} // namespace wavesearch::graphs
