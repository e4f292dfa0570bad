#include "doctest.h"

#include <algorithm>
#include <string>

#include "wavesearch/error.hpp"
#include "wavesearch/lattice.hpp"

using namespace wavesearch;
using namespace wavesearch::lattice;

namespace {

bool mentions(const std::vector<std::string>& problems, const std::string& text) {
    return std::any_of(problems.begin(), problems.end(),
                       [&](const std::string& p) { return p.find(text) != std::string::npos; });
}

} // namespace

TEST_CASE("chain builder") {
    const auto c = build_chain(3, 1.0, 1.0, 0.0, Boundary::free);
    CHECK(c.node_count == 3);
    REQUIRE(c.edges.size() == 2);
    CHECK(c.edges[0] == Edge{0, 1, 1.0});
    CHECK(c.edges[1] == Edge{1, 2, 1.0});

    const auto single = build_chain(1, 1.0, 1.0, 0.0, Boundary::free);
    CHECK(single.node_count == 1);
    CHECK(single.edges.empty());

    const auto closed = build_chain(4, 1.0, 2.0, 0.0, Boundary::periodic);
    CHECK(closed.edges.size() == 4);
    CHECK(std::find(closed.edges.begin(), closed.edges.end(), Edge{0, 3, 2.0}) != closed.edges.end());

    const auto walled = build_chain(4, 1.0, 2.0, 0.5, Boundary::fixed_both);
    CHECK(walled.onsite_springs.front() == doctest::Approx(2.5));
    CHECK(walled.onsite_springs[1] == doctest::Approx(0.5));
    CHECK(walled.onsite_springs.back() == doctest::Approx(2.5));
}

TEST_CASE("chain builder rejects bad parameters") {
    CHECK_THROWS_AS(build_chain(0, 1.0, 1.0, 0.0, Boundary::free), ValidationError);
    CHECK_THROWS_AS(build_chain(3, 0.0, 1.0, 0.0, Boundary::free), ValidationError);
    CHECK_THROWS_AS(build_chain(3, 1.0, -1.0, 0.0, Boundary::free), ValidationError);
    try {
        build_chain(3, -1.0, 1.0, 0.0, Boundary::free);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("m") != std::string::npos);
    }
}

TEST_CASE("ring builder") {
    CHECK(build_ring(3, 1.0, 1.0, 0.0).edges.size() == 3);
    const auto r = build_ring(16, 1.0, 1.0, 0.0);
    CHECK(r.edges.size() == 16);
    for (std::size_t i = 0; i < 16; ++i) CHECK(r.degree(i) == 2);
    CHECK(topology_of(r) == Topology::ring);
    CHECK_THROWS_AS(build_ring(2, 1.0, 1.0, 0.0), ValidationError);
}

TEST_CASE("custom networks") {
    const auto star = build_custom({1, 1, 1, 1, 1}, {0, 0, 0, 0, 0},
                                   {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {0, 4, 1.0}}, Boundary::free);
    CHECK(star.edges.size() == 4);
    CHECK(star.degree(0) == 4);
    CHECK(topology_of(star) == Topology::graph);

    CHECK_THROWS_AS(build_custom({1, 1}, {0, 0}, {{0, 1, 1.0}, {0, 1, 2.0}}, Boundary::free), ValidationError);
    CHECK_THROWS_AS(build_custom({1, 1}, {0, 0}, {{0, 2, 1.0}}, Boundary::free), ValidationError);
    CHECK_THROWS_AS(build_custom({1, -1}, {0, 0}, {{0, 1, 1.0}}, Boundary::free), ValidationError);

    // Reversed pairs are normalised.
    const auto flipped = build_custom({1, 1}, {0, 0}, {{1, 0, 1.0}}, Boundary::free);
    CHECK(flipped.edges[0] == Edge{0, 1, 1.0});
}

TEST_CASE("disconnected networks build but transport rejects them") {
    const auto split = build_custom({1, 1, 1, 1}, {0, 0, 0, 0}, {{0, 1, 1.0}, {2, 3, 1.0}}, Boundary::free);
    CHECK_FALSE(is_connected(split));
    CHECK_THROWS_AS(require_connected(split), Error);
    CHECK(graph_distances(split, 0)[3] == static_cast<std::size_t>(-1));
}

TEST_CASE("fmo preset follows the two pathways") {
    const auto f = fmo_preset();
    CHECK(f.node_count == 7);
    REQUIRE(f.edges.size() == 7);
    auto has = [&](int a, int b) {
        std::size_t i = fmo_pigment(a), j = fmo_pigment(b);
        if (i > j) std::swap(i, j);
        return std::find(f.edges.begin(), f.edges.end(), Edge{i, j, 1.0}) != f.edges.end();
    };
    for (auto [a, b] : {std::pair{6, 5}, {5, 7}, {7, 4}, {4, 3}, {1, 2}, {2, 7}, {7, 3}}) CHECK(has(a, b));
    CHECK(is_connected(f));
    CHECK(fmo_pigment(3) == 2);
    CHECK_THROWS(fmo_pigment(8));
}

TEST_CASE("cavity attachment") {
    const auto s = attach_cavity(build_chain(5, 1.0, 1.0, 0.0, Boundary::free), 2, 1.0, 1.0);
    REQUIRE(s.cavity);
    CHECK(isolated_cavity_frequency(*s.cavity) == doctest::Approx(1.0));
    const auto off = attach_cavity(build_chain(5, 1.0, 1.0, 0.0, Boundary::free), 2, 1.0, 0.0);
    CHECK(isolated_cavity_frequency(*off.cavity) == 0.0);
    CHECK_THROWS_AS(attach_cavity(build_chain(5, 1.0, 1.0, 0.0, Boundary::free), 2, 0.0, 1.0), Error);
    CHECK_THROWS_AS(attach_cavity(s, 1, 1.0, 1.0), Error);
    CHECK_THROWS_AS(attach_cavity(build_chain(5, 1.0, 1.0, 0.0, Boundary::free), 5, 1.0, 1.0), Error);
    CHECK_FALSE(detach_cavity(s).cavity);
}

TEST_CASE("stiffness assembly") {
    const auto two = assemble(build_chain(2, 1.0, 1.0, 0.0, Boundary::free));
    CHECK(two.stiffness(0, 0) == 1.0);
    CHECK(two.stiffness(0, 1) == -1.0);
    CHECK(two.stiffness(1, 0) == -1.0);
    CHECK(two.stiffness(1, 1) == 1.0);

    const auto sys = assemble(attach_cavity(build_chain(2, 1.0, 1.0, 0.0, Boundary::free), 1, 2.0, 3.0));
    REQUIRE(sys.dimension == 3);
    CHECK(sys.stiffness(0, 0) == 1.0);
    CHECK(sys.stiffness(1, 1) == 4.0);
    CHECK(sys.stiffness(2, 2) == 3.0);
    CHECK(sys.stiffness(0, 1) == -1.0);
    CHECK(sys.stiffness(1, 2) == -3.0);
    CHECK(sys.stiffness(0, 2) == 0.0);
    CHECK(sys.mass[2] == 2.0);
    CHECK(sys.cavity_index == 2u);
    CHECK(sys.target_site == 1u);
}

TEST_CASE("assembled stiffness is symmetric with zero row sums for free networks") {
    const auto sys = assemble(fmo_preset());
    for (std::size_t i = 0; i < sys.dimension; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < sys.dimension; ++j) {
            CHECK(sys.stiffness(i, j) == sys.stiffness(j, i));
            row += sys.stiffness(i, j);
        }
        CHECK(row == doctest::Approx(0.0));
    }
}

TEST_CASE("validate lists every problem") {
    CHECK(validate(build_chain(4, 1.0, 1.0, 0.0, Boundary::free)).empty());

    auto bad = build_chain(3, 1.0, 1.0, 0.0, Boundary::free);
    bad.masses[0] = -1.0;
    bad.onsite_springs[1] = -2.0;
    const auto problems = validate(bad);
    CHECK(problems.size() >= 2);
    CHECK(mentions(problems, "mass must be positive"));
    CHECK(mentions(problems, "non-negative"));

    NetworkSpec star;
    star.node_count = 4;
    star.masses.assign(4, 1.0);
    star.onsite_springs.assign(4, 0.0);
    star.edges = {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}};
    star.boundary = Boundary::periodic;
    CHECK(mentions(validate(star), "periodic requires chain ordering"));
}

TEST_CASE("network json round trip") {
    const auto s = attach_cavity(fmo_preset(), 2, 1.5, 0.7, 0.1);
    CHECK(network_from_json(to_json(s)) == s);

    auto doc = to_json(build_chain(3, 1.0, 1.0, 0.0, Boundary::free));
    doc["cavty"] = 1;
    CHECK_THROWS_AS(network_from_json(doc), Error);
}
