#include "wavesearch/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <utility>

#include "wavesearch/error.hpp"

namespace wavesearch::lattice {

namespace {

const char* const kModule = "lattice";

bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

void check_chain_arguments(std::size_t n, double m, double k, double k0) {
    std::vector<std::string> problems;
    if (n == 0) problems.emplace_back("n must be positive");
    if (!positive(m)) problems.emplace_back("m must be positive");
    if (!positive(k)) problems.emplace_back("k must be positive");
    if (!non_negative(k0)) problems.emplace_back("k0 must be non-negative");
    if (!problems.empty()) throw ValidationError(kModule, std::move(problems));
}

} // namespace

const char* to_string(Boundary b) noexcept {
    switch (b) {
    case Boundary::free: return "free";
    case Boundary::fixed_left: return "fixed_left";
    case Boundary::fixed_right: return "fixed_right";
    case Boundary::fixed_both: return "fixed_both";
    case Boundary::periodic: return "periodic";
    }
    return "free";
}

Boundary boundary_from_string(const std::string& name) {
    for (Boundary b : {Boundary::free, Boundary::fixed_left, Boundary::fixed_right,
                       Boundary::fixed_both, Boundary::periodic}) {
        if (name == to_string(b)) return b;
    }
    throw Error(ErrorKind::validation, kModule, "unknown boundary kind '" + name + "'");
}

std::size_t NetworkSpec::degree(std::size_t node) const {
    return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [&](const Edge& e) {
        return e.i == node || e.j == node;
    }));
}

NetworkSpec build_chain(std::size_t n, double m, double k, double k0, Boundary boundary) {
    check_chain_arguments(n, m, k, k0);
    if (boundary == Boundary::periodic && n < 3)
        throw ValidationError(kModule, {"periodic chain needs at least 3 nodes"});

    NetworkSpec spec;
    spec.node_count = n;
    spec.masses.assign(n, m);
    spec.onsite_springs.assign(n, k0);
    spec.boundary = boundary;
    for (std::size_t i = 0; i + 1 < n; ++i) spec.edges.push_back({i, i + 1, k});
    if (boundary == Boundary::periodic) spec.edges.push_back({0, n - 1, k});
    // A wall is a pinned node beyond the end: one extra spring k to ground.
    if (boundary == Boundary::fixed_left || boundary == Boundary::fixed_both)
        spec.onsite_springs.front() += k;
    if (boundary == Boundary::fixed_right || boundary == Boundary::fixed_both)
        spec.onsite_springs.back() += k;
    return spec;
}

NetworkSpec build_ring(std::size_t n, double m, double k, double k0) {
    if (n < 3) throw ValidationError(kModule, {"ring needs at least 3 nodes"});
    return build_chain(n, m, k, k0, Boundary::periodic);
}

NetworkSpec build_custom(std::vector<double> masses, std::vector<double> onsite_springs,
                         std::vector<Edge> edges, Boundary boundary) {
    NetworkSpec spec;
    spec.node_count = masses.size();
    spec.masses = std::move(masses);
    spec.onsite_springs = std::move(onsite_springs);
    for (auto& e : edges)
        if (e.i > e.j) std::swap(e.i, e.j);
    spec.edges = std::move(edges);
    spec.boundary = boundary;
    require_valid(spec);
    return spec;
}

NetworkSpec fmo_preset(double k, double m) {
    // Pathways 6-5-7-4-3 and 1-2-7-3, as 1-based pigment labels.
    static constexpr std::pair<int, int> kPairs[] = {{6, 5}, {5, 7}, {7, 4}, {4, 3},
                                                     {1, 2}, {2, 7}, {7, 3}};
    std::vector<Edge> edges;
    for (auto [a, b] : kPairs) edges.push_back({fmo_pigment(a), fmo_pigment(b), k});
    return build_custom(std::vector<double>(7, m), std::vector<double>(7, 0.0), std::move(edges),
                        Boundary::free);
}

std::size_t fmo_pigment(int label) {
    if (label < 1 || label > 7)
        throw Error(ErrorKind::range, kModule, "pigment label must be in 1..7");
    return static_cast<std::size_t>(label - 1);
}

NetworkSpec attach_cavity(NetworkSpec spec, std::size_t site, double mass, double spring,
                          double onsite) {
    std::vector<std::string> problems;
    if (spec.cavity) problems.emplace_back("cavity already attached (single cavity supported)");
    if (site >= spec.node_count) problems.emplace_back("cavity site out of range");
    if (!positive(mass)) problems.emplace_back("cavity mass must be positive");
    if (!non_negative(spring)) problems.emplace_back("cavity spring must be non-negative");
    if (!non_negative(onsite)) problems.emplace_back("cavity onsite must be non-negative");
    if (!problems.empty()) throw ValidationError(kModule, std::move(problems));
    spec.cavity = Cavity{site, mass, spring, onsite};
    return spec;
}

NetworkSpec detach_cavity(NetworkSpec spec) {
    spec.cavity.reset();
    return spec;
}

double isolated_cavity_frequency(const Cavity& cavity) {
    return std::sqrt(cavity.spring / cavity.mass);
}

bool has_chain_ordering(const NetworkSpec& spec) {
    if (spec.node_count == 0 || spec.edges.size() != spec.node_count - 1) return false;
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& e : spec.edges) pairs.insert({std::min(e.i, e.j), std::max(e.i, e.j)});
    for (std::size_t i = 0; i + 1 < spec.node_count; ++i)
        if (!pairs.contains({i, i + 1})) return false;
    return true;
}

bool has_ring_ordering(const NetworkSpec& spec) {
    const std::size_t n = spec.node_count;
    if (n < 3 || spec.edges.size() != n) return false;
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& e : spec.edges) pairs.insert({std::min(e.i, e.j), std::max(e.i, e.j)});
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!pairs.contains({i, i + 1})) return false;
    return pairs.contains({0, n - 1});
}

Topology topology_of(const NetworkSpec& spec) {
    if (spec.boundary == Boundary::periodic && has_ring_ordering(spec)) return Topology::ring;
    if (spec.boundary != Boundary::periodic && has_chain_ordering(spec)) return Topology::chain;
    return Topology::graph;
}

std::vector<std::string> validate(const NetworkSpec& spec) {
    std::vector<std::string> problems;
    const std::size_t n = spec.node_count;
    if (n == 0) problems.emplace_back("node_count must be positive");
    if (spec.masses.size() != n) problems.emplace_back("masses must have node_count entries");
    if (spec.onsite_springs.size() != n)
        problems.emplace_back("onsite_springs must have node_count entries");
    for (std::size_t i = 0; i < spec.masses.size(); ++i)
        if (!positive(spec.masses[i]))
            problems.push_back("masses[" + std::to_string(i) + "]: mass must be positive");
    for (std::size_t i = 0; i < spec.onsite_springs.size(); ++i)
        if (!non_negative(spec.onsite_springs[i]))
            problems.push_back("onsite_springs[" + std::to_string(i) +
                               "]: stiffness must be non-negative");

    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t e = 0; e < spec.edges.size(); ++e) {
        const auto& edge = spec.edges[e];
        const std::string where = "edges[" + std::to_string(e) + "]: ";
        if (edge.i >= n || edge.j >= n) {
            problems.push_back(where + "node index out of range");
            continue;
        }
        if (edge.i == edge.j) problems.push_back(where + "self-loop");
        if (edge.i > edge.j) problems.push_back(where + "must be stored with i < j");
        if (!positive(edge.k)) problems.push_back(where + "edge stiffness must be positive");
        if (!seen.insert({std::min(edge.i, edge.j), std::max(edge.i, edge.j)}).second)
            problems.push_back(where + "duplicate edge");
    }

    if (spec.boundary == Boundary::periodic && !has_ring_ordering(spec))
        problems.emplace_back("periodic requires chain ordering");
    if ((spec.boundary == Boundary::fixed_left || spec.boundary == Boundary::fixed_right ||
         spec.boundary == Boundary::fixed_both) &&
        !has_chain_ordering(spec))
        problems.emplace_back("fixed boundary requires chain ordering");

    if (spec.cavity) {
        const auto& c = *spec.cavity;
        if (c.target_site >= n) problems.emplace_back("cavity target_site out of range");
        if (!positive(c.mass)) problems.emplace_back("cavity_mass must be positive");
        if (!non_negative(c.spring)) problems.emplace_back("cavity_spring must be non-negative");
        if (!non_negative(c.onsite)) problems.emplace_back("cavity_onsite must be non-negative");
    }
    return problems;
}

void require_valid(const NetworkSpec& spec) {
    auto problems = validate(spec);
    if (!problems.empty()) throw ValidationError(kModule, std::move(problems));
}

std::vector<std::vector<std::size_t>> adjacency(const NetworkSpec& spec) {
    std::vector<std::vector<std::size_t>> adj(spec.node_count);
    for (const auto& e : spec.edges) {
        adj[e.i].push_back(e.j);
        adj[e.j].push_back(e.i);
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    return adj;
}

std::vector<std::size_t> graph_distances(const NetworkSpec& spec, std::size_t source) {
    constexpr auto kUnreached = static_cast<std::size_t>(-1);
    const auto adj = adjacency(spec);
    std::vector<std::size_t> dist(spec.node_count, kUnreached);
    std::queue<std::size_t> frontier;
    dist[source] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
        const auto u = frontier.front();
        frontier.pop();
        for (auto v : adj[u]) {
            if (dist[v] == kUnreached) {
                dist[v] = dist[u] + 1;
                frontier.push(v);
            }
        }
    }
    return dist;
}

bool is_connected(const NetworkSpec& spec) {
    if (spec.node_count == 0) return false;
    const auto dist = graph_distances(spec, 0);
    return std::none_of(dist.begin(), dist.end(),
                        [](std::size_t d) { return d == static_cast<std::size_t>(-1); });
}

void require_connected(const NetworkSpec& spec) {
    if (!is_connected(spec))
        throw Error(ErrorKind::validation, kModule,
                    "network graph is disconnected; transport runs need a connected network");
}

StiffnessSystem assemble(const NetworkSpec& spec) {
    require_valid(spec);
    const std::size_t n = spec.node_count;
    const std::size_t dim = spec.cavity ? n + 1 : n;

    StiffnessSystem sys;
    sys.dimension = dim;
    sys.node_count = n;
    sys.mass = spec.masses;
    sys.onsite = spec.onsite_springs;
    sys.stiffness = Matrix(dim, dim);
    sys.topology = topology_of(spec);

    auto& kmat = sys.stiffness;
    for (std::size_t i = 0; i < n; ++i) kmat(i, i) = spec.onsite_springs[i];
    for (const auto& e : spec.edges) {
        kmat(e.i, e.i) += e.k;
        kmat(e.j, e.j) += e.k;
        kmat(e.i, e.j) -= e.k;
        kmat(e.j, e.i) -= e.k;
        sys.springs.push_back({e.i, e.j, e.k});
    }
    if (spec.cavity) {
        const auto& c = *spec.cavity;
        const std::size_t ci = n;
        sys.mass.push_back(c.mass);
        sys.onsite.push_back(c.onsite);
        kmat(ci, ci) = c.onsite + c.spring;
        kmat(c.target_site, c.target_site) += c.spring;
        kmat(c.target_site, ci) -= c.spring;
        kmat(ci, c.target_site) -= c.spring;
        sys.springs.push_back({c.target_site, ci, c.spring});
        sys.cavity_index = ci;
        sys.target_site = c.target_site;
    }
    sys.sparse = SparseRows::from_dense(kmat);
    return sys;
}

} // namespace wavesearch::lattice
