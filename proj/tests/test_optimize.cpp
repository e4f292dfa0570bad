#include "doctest.h"

#include <atomic>
#include <cmath>

#include "wavesearch/error.hpp"
#include "wavesearch/optimize.hpp"

using namespace wavesearch;
using namespace wavesearch::optimize;

namespace {

Problem quadratic(double cx, double cy) {
    Problem p;
    p.parameters = {{"x", 0.0, 1.0, false}, {"y", 0.0, 1.0, false}};
    p.evaluate = [=](std::span<const double> v) {
        return -(v[0] - cx) * (v[0] - cx) - (v[1] - cy) * (v[1] - cy);
    };
    return p;
}

} // namespace

TEST_CASE("grid search ordering and ties") {
    Problem flat;
    flat.parameters = {{"a", 1.0, 2.0, false}, {"b", 0.1, 10.0, true}};
    flat.evaluate = [](std::span<const double>) { return 3.0; };
    const std::vector<std::size_t> res{5, 4};
    const auto r = grid_search(flat, res);
    CHECK(r.best[0] == 1.0);
    CHECK(r.best[1] == doctest::Approx(0.1));
    CHECK(r.evaluations == 20);
    // First parameter slowest.
    CHECK(r.trace[1].params[0] == 1.0);
    CHECK(r.trace[1].params[1] > 0.1);
    CHECK(r.trace[4].params[0] > 1.0);

    const std::vector<std::size_t> one{1, 1};
    const auto single = grid_search(flat, one);
    CHECK(single.evaluations == 1);
    CHECK(single.best[0] == 1.0);
    CHECK(single.best[1] == doctest::Approx(0.1));
}

TEST_CASE("grid search finds the best node and is parallel-invariant") {
    const auto p = quadratic(0.3, 0.7);
    const std::vector<std::size_t> res{11, 11};
    const auto serial = grid_search(p, res, 1);
    const auto threaded = grid_search(p, res, 4);
    CHECK(serial.best[0] == doctest::Approx(0.3));
    CHECK(serial.best[1] == doctest::Approx(0.7));
    CHECK(serial.best == threaded.best);
    REQUIRE(serial.trace.size() == threaded.trace.size());
    for (std::size_t i = 0; i < serial.trace.size(); ++i) CHECK(serial.trace[i].value == threaded.trace[i].value);
}

TEST_CASE("grid search guard") {
    const auto p = quadratic(0.5, 0.5);
    const std::vector<std::size_t> res{2000, 2000};
    CHECK_THROWS_AS(grid_search(p, res), Error);
}

TEST_CASE("nelder-mead converges and never loses the start point") {
    const auto p = quadratic(0.42, 0.58);
    const std::vector<double> start{0.5, 0.5};
    const auto r = refine_nelder_mead(p, start, {0.1, 1e-8, 500});
    CHECK(r.converged);
    CHECK(r.best[0] == doctest::Approx(0.42).epsilon(1e-3));
    CHECK(r.best[1] == doctest::Approx(0.58).epsilon(1e-3));
    CHECK(r.best_value >= p.evaluate(start));
    CHECK(r.trace.front().params == start);

    const auto capped = refine_nelder_mead(p, start, {0.1, 1e-14, 5});
    CHECK_FALSE(capped.converged);
    CHECK(capped.evaluations <= 5);

    // Optimum outside the box: stays clipped to the bound.
    const auto edge = refine_nelder_mead(quadratic(1.5, 0.5), start, {0.1, 1e-8, 500});
    CHECK(edge.best[0] <= 1.0);
    CHECK(edge.best[0] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("objective evaluation is pure") {
    ObjectiveSpec spec;
    spec.base = lattice::attach_cavity(lattice::build_ring(8, 1.0, 1.0, 0.0), 0, 0.5, 0.5);
    spec.excitations = {ExcitationRecipe::at_site(4)};
    spec.free = {{FreeParameter::Kind::cavity_omega, 0, 0.2, 1.8, false},
                 {FreeParameter::Kind::cavity_mass, 0, 0.05, 5.0, true}};
    spec.t_final = 200;
    const std::vector<double> a{1.1, 0.3}, b{0.7, 1.5};
    const double va = evaluate(spec, a);
    const double vb = evaluate(spec, b);
    CHECK(evaluate(spec, a) == va);
    CHECK(evaluate(spec, b) == vb);
    const auto net = apply_parameters(spec, a);
    CHECK(net.cavity->mass == doctest::Approx(0.3));
    CHECK(net.cavity->spring == doctest::Approx(0.3 * 1.1 * 1.1));

    ObjectiveSpec bad = spec;
    bad.base = lattice::build_ring(8, 1.0, 1.0, 0.0);
    CHECK_THROWS_AS(require_valid(bad), Error);
}

TEST_CASE("cavity tuning") {
    const auto ring = lattice::attach_cavity(lattice::build_ring(8, 1.0, 1.0, 0.0), 0, 1.0, 1.0);
    TuneOptions o;
    o.grid = 12;
    o.refine.max_evals = 60;
    const auto r = tune_cavity(ring, {ExcitationRecipe::at_site(4)}, 640, o);
    CHECK(r.eta > 0.5);
    CHECK(r.eta <= 1.0);
    CHECK(r.refined.best_value >= r.grid.best_value);
    CHECK(r.spring == doctest::Approx(r.mass * r.omega * r.omega));
    // The tuned value beats a blind guess.
    CHECK(r.eta >= cavity_capture(ring, ExcitationRecipe::at_site(4), 1.0, 1.0, 640).eta);

    // Light cavities tuned above the band: evanescent, nothing captured.
    TuneOptions above = o;
    above.omega_lower = 3.0;
    above.omega_upper = 4.0;
    above.mass_lower = 0.003;
    above.mass_upper = 0.01;
    above.grid = 6;
    above.refine.max_evals = 20;
    CHECK(tune_cavity(ring, {ExcitationRecipe::at_site(4)}, 400, above).eta <= 0.02);
}

TEST_CASE("metric names") {
    CHECK(metric_from_string(to_string(Metric::eta_times_trap_duration)) == Metric::eta_times_trap_duration);
    CHECK_THROWS_AS(metric_from_string("bogus"), Error);
    CHECK(reference_frequency(lattice::build_ring(5, 4.0, 1.0, 0.0)) == doctest::Approx(0.5));
}

TEST_CASE("topology enumeration ranks connected graphs") {
    EnumerateOptions o;
    o.n = 3;
    o.tune.grid = 6;
    o.tune.refine.max_evals = 10;
    const auto entries = enumerate_topologies(o);
    // Path (2 orbits) plus triangle (1 orbit).
    CHECK(entries.size() == 3);
    for (std::size_t i = 1; i < entries.size(); ++i) CHECK(entries[i - 1].eta >= entries[i].eta);
    for (const auto& e : entries) {
        CHECK(e.eta > 0.0);
        CHECK(e.n == 3);
    }
    o.n = 9;
    CHECK_THROWS_AS(enumerate_topologies(o), Error);
}
