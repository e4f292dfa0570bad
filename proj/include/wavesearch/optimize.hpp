#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wavesearch/lattice.hpp"
#include "wavesearch/transport.hpp"

namespace wavesearch::optimize {

using lattice::NetworkSpec;
using transport::ExcitationRecipe;

enum class Metric { peak_eta, eta_times_trap_duration };

const char* to_string(Metric metric) noexcept;
Metric metric_from_string(const std::string& name);

/// One box-bounded coordinate. Log-scaled axes are gridded and simplex-searched in log space.
struct Parameter {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
    bool log_scale = false;
};

/// Generic maximisation problem.
struct Problem {
    std::vector<Parameter> parameters;
    std::function<double(std::span<const double>)> evaluate;
};

struct TraceEntry {
    std::size_t index = 0;
    std::vector<double> params;
    double value = 0.0;
};

struct OptimResult {
    std::vector<std::string> names;
    std::vector<double> best;
    double best_value = 0.0;
    std::size_t evaluations = 0;
    std::vector<TraceEntry> trace;
    std::uint64_t seed = 0;
    bool converged = true;
};

/// Free parameters over a network with one cavity.
struct FreeParameter {
    enum class Kind { cavity_spring, cavity_mass, cavity_omega, onsite, edge };
    Kind kind = Kind::cavity_omega;
    std::size_t index = 0;  // node for onsite, edge position for edge
    double lower = 0.0;
    double upper = 1.0;
    bool log_scale = false;

    std::string name() const;
};

/// Capture-efficiency objective: averaged over the excitation list.
/// cavity_omega sets K = M Omega^2 after the other parameters are applied.
struct ObjectiveSpec {
    NetworkSpec base;
    std::vector<ExcitationRecipe> excitations;
    std::vector<FreeParameter> free;
    double t_final = 100.0;
    double sample_dt = 0.25;
    Metric metric = Metric::peak_eta;
};

void require_valid(const ObjectiveSpec& objective);
NetworkSpec apply_parameters(const ObjectiveSpec& objective, std::span<const double> params);
double evaluate(const ObjectiveSpec& objective, std::span<const double> params);
Problem make_problem(const ObjectiveSpec& objective);

/// Exhaustive grid in ascending lexicographic order (first parameter slowest);
/// only a strictly greater value replaces the incumbent. At most 1e6 points.
OptimResult grid_search(const Problem& problem, std::span<const std::size_t> resolution,
                        unsigned jobs = 1);
OptimResult grid_search(const ObjectiveSpec& objective, std::span<const std::size_t> resolution,
                        unsigned jobs = 1);

struct NelderMeadOptions {
    double init_scale = 0.05;  // in normalized [0, 1] coordinates
    double tol = 1e-6;         // simplex diameter, normalized coordinates
    std::size_t max_evals = 400;
};

/// Box-clipped Nelder-Mead (1, 2, 1/2, 1/2) maximising problem.evaluate.
/// The start point is evaluated first, so the result never drops below it.
OptimResult refine_nelder_mead(const Problem& problem, std::span<const double> start,
                               const NelderMeadOptions& options = {});

struct TuneOptions {
    std::size_t grid = 32;
    double omega_lower = 0.1;  // times sqrt(k/m)
    double omega_upper = 1.9;
    double mass_lower = 0.01;  // times m
    double mass_upper = 10.0;
    double sample_dt = 0.25;
    Metric metric = Metric::peak_eta;
    NelderMeadOptions refine{0.02, 1e-6, 200};
    unsigned jobs = 1;
};

struct TuneResult {
    OptimResult grid;
    OptimResult refined;
    double omega = 0.0;
    double mass = 0.0;
    double spring = 0.0;
    double metric_value = 0.0;
    double eta = 0.0;
    double trap_duration = 0.0;
};

/// Characteristic sqrt(k/m) of a network: mean edge stiffness over mean mass.
double reference_frequency(const NetworkSpec& spec);

/// (Omega, M) grid then Nelder-Mead; K = M Omega^2. The network must carry a cavity.
TuneResult tune_cavity(const NetworkSpec& spec, const std::vector<ExcitationRecipe>& excitations,
                       double t_final, const TuneOptions& options = {});

/// Capture report for given cavity parameters, averaged eta over the excitations.
transport::CaptureReport cavity_capture(const NetworkSpec& spec, const ExcitationRecipe& excitation,
                                        double spring, double mass, double t_final,
                                        double sample_dt = 0.25);

enum class ExcitationPolicy { farthest, average };

const char* to_string(ExcitationPolicy policy) noexcept;
ExcitationPolicy policy_from_string(const std::string& name);

struct EnumerateOptions {
    std::size_t n = 4;
    std::size_t min_edges = 0;
    std::size_t max_edges = 28;
    double k = 1.0;
    double m = 1.0;
    ExcitationPolicy policy = ExcitationPolicy::farthest;
    double horizon_per_node = 80.0;
    std::size_t top = 20;
    TuneOptions tune;
};

struct TopologyEntry {
    std::string graph6;
    std::string edge_list;
    std::size_t n = 0;
    std::size_t edges = 0;
    std::size_t target = 0;
    double eta = 0.0;
    double spring = 0.0;
    double mass = 0.0;
    double omega = 0.0;
};

/// Every connected graph within the edge budget, every target orbit, ranked by eta.
std::vector<TopologyEntry> enumerate_topologies(const EnumerateOptions& options);

} // namespace wavesearch::optimize
