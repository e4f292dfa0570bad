#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wavesearch/linalg.hpp"

namespace wavesearch::lattice {

enum class Boundary { free, fixed_left, fixed_right, fixed_both, periodic };

const char* to_string(Boundary b) noexcept;
Boundary boundary_from_string(const std::string& name);

struct Edge {
    std::size_t i = 0;
    std::size_t j = 0;
    double k = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Side-branch storage oscillator hanging off one network node.
struct Cavity {
    std::size_t target_site = 0;
    double mass = 1.0;    // M
    double spring = 0.0;  // K, coupling to the target site
    double onsite = 0.0;

    friend bool operator==(const Cavity&, const Cavity&) = default;
};

/// Declarative oscillator network. Edges are undirected and stored once with i < j.
/// Fixed walls are folded into onsite_springs at the end node(s); `boundary`
/// keeps the wall marker.
struct NetworkSpec {
    std::size_t node_count = 0;
    std::vector<double> masses;
    std::vector<double> onsite_springs;
    std::vector<Edge> edges;
    Boundary boundary = Boundary::free;
    std::optional<Cavity> cavity;

    std::size_t degree(std::size_t node) const;

    friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

enum class Topology { chain, ring, graph };

struct Spring {
    std::size_t i = 0;
    std::size_t j = 0;
    double k = 0.0;
};

/// Mass vector plus symmetric stiffness, dimension N (or N+1 with the cavity last).
struct StiffnessSystem {
    std::size_t dimension = 0;
    std::size_t node_count = 0;
    std::vector<double> mass;
    Matrix stiffness;
    std::vector<double> onsite;    // per degree of freedom, walls included
    std::vector<Spring> springs;   // network edges, then the cavity spring
    std::optional<std::size_t> cavity_index;
    std::optional<std::size_t> target_site;
    Topology topology = Topology::graph;
    SparseRows sparse;

    bool has_cavity() const noexcept { return cavity_index.has_value(); }
};

NetworkSpec build_chain(std::size_t n, double m, double k, double k0, Boundary boundary);
NetworkSpec build_ring(std::size_t n, double m, double k, double k0);
NetworkSpec build_custom(std::vector<double> masses, std::vector<double> onsite_springs,
                         std::vector<Edge> edges, Boundary boundary);

/// Seven-pigment antenna: pathways 6-5-7-4-3 and 1-2-7-3, unit k and m, free
/// boundary, no cavity. Nodes are pigments 1..7 stored 0-based.
NetworkSpec fmo_preset(double k = 1.0, double m = 1.0);
std::size_t fmo_pigment(int label);
inline constexpr int fmo_reaction_centre_pigment = 3;

NetworkSpec attach_cavity(NetworkSpec spec, std::size_t site, double mass, double spring,
                          double onsite = 0.0);
NetworkSpec detach_cavity(NetworkSpec spec);

/// sqrt(K/M) of the isolated side branch.
double isolated_cavity_frequency(const Cavity& cavity);

/// Every violated invariant; empty when the network is valid.
std::vector<std::string> validate(const NetworkSpec& spec);
void require_valid(const NetworkSpec& spec);

bool is_connected(const NetworkSpec& spec);
/// Transport experiments need a connected network.
void require_connected(const NetworkSpec& spec);

bool has_chain_ordering(const NetworkSpec& spec);  // edges (i, i+1) only
bool has_ring_ordering(const NetworkSpec& spec);   // chain plus (0, n-1)
Topology topology_of(const NetworkSpec& spec);

StiffnessSystem assemble(const NetworkSpec& spec);

std::vector<std::vector<std::size_t>> adjacency(const NetworkSpec& spec);
std::vector<std::size_t> graph_distances(const NetworkSpec& spec, std::size_t source);

nlohmann::json to_json(const NetworkSpec& spec);
/// Strict parse: unknown fields are rejected; the result is validated.
NetworkSpec network_from_json(const nlohmann::json& doc);

} // namespace wavesearch::lattice
