#include "wavesearch/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wavesearch/error.hpp"
#include "wavesearch/graphs.hpp"
#include "wavesearch/parallel.hpp"

namespace wavesearch::optimize {

namespace {

const char* const kModule = "optimize";

double to_unit(const Parameter& p, double x) {
    if (p.log_scale) return (std::log(x) - std::log(p.lower)) / (std::log(p.upper) - std::log(p.lower));
    return (x - p.lower) / (p.upper - p.lower);
}

double from_unit(const Parameter& p, double u) {
    u = std::clamp(u, 0.0, 1.0);
    if (u == 0.0) return p.lower;
    if (u == 1.0) return p.upper;
    if (p.log_scale) return std::exp(std::log(p.lower) + u * (std::log(p.upper) - std::log(p.lower)));
    return p.lower + u * (p.upper - p.lower);
}

void check_problem(const Problem& problem) {
    if (problem.parameters.empty())
        throw Error(ErrorKind::validation, kModule, "at least one free parameter is required");
    if (!problem.evaluate) throw Error(ErrorKind::validation, kModule, "objective has no evaluator");
    for (const auto& p : problem.parameters) {
        if (!std::isfinite(p.lower) || !std::isfinite(p.upper) || !(p.lower < p.upper))
            throw Error(ErrorKind::validation, kModule,
                        "bounds of '" + p.name + "' must be finite with lower < upper");
        if (p.log_scale && !(p.lower > 0.0))
            throw Error(ErrorKind::validation, kModule, "log-scaled '" + p.name + "' needs lower > 0");
    }
}

double sanitize(double v) { return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v; }

std::vector<std::string> names_of(const Problem& problem) {
    std::vector<std::string> names;
    for (const auto& p : problem.parameters) names.push_back(p.name);
    return names;
}

} // namespace

const char* to_string(Metric metric) noexcept {
    return metric == Metric::peak_eta ? "peak_eta" : "eta_times_trap_duration";
}

Metric metric_from_string(const std::string& name) {
    if (name == "peak_eta") return Metric::peak_eta;
    if (name == "eta_times_trap_duration") return Metric::eta_times_trap_duration;
    throw Error(ErrorKind::validation, kModule, "unknown metric '" + name + "'");
}

const char* to_string(ExcitationPolicy policy) noexcept {
    return policy == ExcitationPolicy::farthest ? "farthest" : "average";
}

ExcitationPolicy policy_from_string(const std::string& name) {
    if (name == "farthest") return ExcitationPolicy::farthest;
    if (name == "average") return ExcitationPolicy::average;
    throw Error(ErrorKind::validation, kModule, "unknown excitation policy '" + name + "'");
}

std::string FreeParameter::name() const {
    switch (kind) {
    case Kind::cavity_spring: return "K";
    case Kind::cavity_mass: return "M";
    case Kind::cavity_omega: return "Omega";
    case Kind::onsite: return "k0[" + std::to_string(index) + "]";
    case Kind::edge: return "k_edge[" + std::to_string(index) + "]";
    }
    return "?";
}

void require_valid(const ObjectiveSpec& objective) {
    lattice::require_valid(objective.base);
    if (!objective.base.cavity)
        throw Error(ErrorKind::validation, kModule, "objective network needs a cavity");
    lattice::require_connected(objective.base);
    if (objective.free.empty())
        throw Error(ErrorKind::validation, kModule, "at least one free parameter is required");
    if (objective.excitations.empty())
        throw Error(ErrorKind::validation, kModule, "at least one excitation is required");
    if (!(objective.t_final > 0.0) || !(objective.sample_dt > 0.0))
        throw Error(ErrorKind::validation, kModule, "horizon and sample_dt must be positive");
    for (const auto& f : objective.free) {
        if (!std::isfinite(f.lower) || !std::isfinite(f.upper) || !(f.lower < f.upper))
            throw Error(ErrorKind::validation, kModule,
                        "bounds of '" + f.name() + "' must be finite with lower < upper");
        if (f.kind == FreeParameter::Kind::onsite && f.index >= objective.base.node_count)
            throw Error(ErrorKind::range, kModule, "onsite parameter index out of range");
        if (f.kind == FreeParameter::Kind::edge && f.index >= objective.base.edges.size())
            throw Error(ErrorKind::range, kModule, "edge parameter index out of range");
    }
}

NetworkSpec apply_parameters(const ObjectiveSpec& objective, std::span<const double> params) {
    if (params.size() != objective.free.size())
        throw Error(ErrorKind::validation, kModule, "parameter vector has the wrong length");
    NetworkSpec spec = objective.base;
    auto& cav = *spec.cavity;
    double omega = -1.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& f = objective.free[i];
        switch (f.kind) {
        case FreeParameter::Kind::cavity_spring: cav.spring = params[i]; break;
        case FreeParameter::Kind::cavity_mass: cav.mass = params[i]; break;
        case FreeParameter::Kind::cavity_omega: omega = params[i]; break;
        case FreeParameter::Kind::onsite: spec.onsite_springs[f.index] = params[i]; break;
        case FreeParameter::Kind::edge: spec.edges[f.index].k = params[i]; break;
        }
    }
    if (omega >= 0.0) cav.spring = cav.mass * omega * omega;
    return spec;
}

transport::CaptureReport cavity_capture(const NetworkSpec& spec, const ExcitationRecipe& excitation,
                                        double spring, double mass, double t_final,
                                        double sample_dt) {
    if (!spec.cavity) throw Error(ErrorKind::validation, kModule, "network needs a cavity");
    NetworkSpec s = spec;
    s.cavity->spring = spring;
    s.cavity->mass = mass;
    const auto system = lattice::assemble(s);
    const auto basis = modes::normal_modes(system);
    const auto st = transport::excite(system, basis, excitation).state;
    return transport::exact_capture(system, basis, st, t_final, sample_dt);
}

double evaluate(const ObjectiveSpec& objective, std::span<const double> params) {
    const auto spec = apply_parameters(objective, params);
    const auto system = lattice::assemble(spec);
    const auto basis = modes::normal_modes(system);
    double sum = 0.0;
    for (const auto& exc : objective.excitations) {
        const auto st = transport::excite(system, basis, exc).state;
        const auto rep = transport::exact_capture(system, basis, st, objective.t_final, objective.sample_dt);
        sum += objective.metric == Metric::peak_eta ? rep.eta : rep.eta * rep.trap_duration;
    }
    return sum / static_cast<double>(objective.excitations.size());
}

Problem make_problem(const ObjectiveSpec& objective) {
    require_valid(objective);
    Problem problem;
    for (const auto& f : objective.free) problem.parameters.push_back({f.name(), f.lower, f.upper, f.log_scale});
    problem.evaluate = [objective](std::span<const double> x) { return evaluate(objective, x); };
    return problem;
}

OptimResult grid_search(const Problem& problem, std::span<const std::size_t> resolution, unsigned jobs) {
    check_problem(problem);
    const std::size_t dims = problem.parameters.size();
    if (resolution.size() != dims)
        throw Error(ErrorKind::validation, kModule, "need one resolution per parameter");
    std::size_t total = 1;
    for (auto r : resolution) {
        if (r == 0) throw Error(ErrorKind::validation, kModule, "resolution must be >= 1 per axis");
        if (r > 1000000 || total * r > 1000000)
            throw Error(ErrorKind::guard, kModule,
                        "grid exceeds 1e6 points; use a coarser grid");
        total *= r;
    }

    auto point = [&](std::size_t index) {
        std::vector<double> x(dims);
        for (std::size_t d = dims; d-- > 0;) {
            const std::size_t r = resolution[d];
            const std::size_t j = index % r;
            index /= r;
            const double u = r == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(r - 1);
            x[d] = from_unit(problem.parameters[d], u);
        }
        return x;
    };

    std::vector<double> values(total);
    parallel_for(total, jobs, [&](std::size_t i) {
        const auto x = point(i);
        values[i] = problem.evaluate(x);
    });

    OptimResult res;
    res.names = names_of(problem);
    res.evaluations = total;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < total; ++i) {
        const auto x = point(i);
        res.trace.push_back({i, x, values[i]});
        if (i == 0 || sanitize(values[i]) > best) {
            best = sanitize(values[i]);
            best_index = i;
        }
    }
    res.best = point(best_index);
    res.best_value = values[best_index];
    return res;
}

OptimResult grid_search(const ObjectiveSpec& objective, std::span<const std::size_t> resolution,
                        unsigned jobs) {
    return grid_search(make_problem(objective), resolution, jobs);
}

OptimResult refine_nelder_mead(const Problem& problem, std::span<const double> start,
                               const NelderMeadOptions& options) {
    check_problem(problem);
    const std::size_t dims = problem.parameters.size();
    if (start.size() != dims) throw Error(ErrorKind::validation, kModule, "start has the wrong length");
    for (std::size_t d = 0; d < dims; ++d) {
        const auto& p = problem.parameters[d];
        if (!(start[d] >= p.lower && start[d] <= p.upper))
            throw Error(ErrorKind::range, kModule, "start of '" + p.name + "' lies outside its bounds");
    }
    if (options.max_evals == 0) throw Error(ErrorKind::validation, kModule, "max_evals must be >= 1");

    OptimResult res;
    res.names = names_of(problem);

    struct Vertex {
        std::vector<double> u;
        std::vector<double> x;
        double value;  // maximised
    };
    auto params_of = [&](const std::vector<double>& u) {
        std::vector<double> x(dims);
        for (std::size_t d = 0; d < dims; ++d) x[d] = from_unit(problem.parameters[d], u[d]);
        return x;
    };
    auto clip = [](std::vector<double> u) {
        for (double& v : u) v = std::clamp(v, 0.0, 1.0);
        return u;
    };
    std::size_t best_trace = 0;
    auto eval = [&](std::vector<double> u, std::vector<double> x) {
        const double v = sanitize(problem.evaluate(x));
        res.trace.push_back({res.trace.size(), x, v});
        if (res.trace.size() == 1 || v > res.trace[best_trace].value) best_trace = res.trace.size() - 1;
        return Vertex{std::move(u), std::move(x), v};
    };
    auto budget_left = [&] { return res.trace.size() < options.max_evals; };

    std::vector<double> u0(dims);
    for (std::size_t d = 0; d < dims; ++d) u0[d] = std::clamp(to_unit(problem.parameters[d], start[d]), 0.0, 1.0);
    std::vector<Vertex> simplex;
    simplex.push_back(eval(u0, std::vector<double>(start.begin(), start.end())));
    bool exhausted = false;
    for (std::size_t d = 0; d < dims; ++d) {
        if (!budget_left()) {
            exhausted = true;
            break;
        }
        auto u = u0;
        u[d] += u[d] + options.init_scale <= 1.0 ? options.init_scale : -options.init_scale;
        u = clip(u);
        simplex.push_back(eval(u, params_of(u)));
    }

    auto order = [&] {
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const Vertex& a, const Vertex& b) { return a.value > b.value; });
    };
    auto diameter = [&] {
        double diam = 0.0;
        for (std::size_t i = 1; i < simplex.size(); ++i) {
            double s = 0.0;
            for (std::size_t d = 0; d < dims; ++d) {
                const double delta = simplex[i].u[d] - simplex[0].u[d];
                s += delta * delta;
            }
            diam = std::max(diam, std::sqrt(s));
        }
        return diam;
    };
    auto toward = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
        std::vector<double> u(dims);
        for (std::size_t d = 0; d < dims; ++d) u[d] = c[d] + t * (w[d] - c[d]);
        return clip(u);
    };

    res.converged = false;
    while (!exhausted) {
        order();
        if (diameter() < options.tol) {
            res.converged = true;
            break;
        }
        if (!budget_left()) break;

        std::vector<double> centroid(dims, 0.0);
        for (std::size_t i = 0; i + 1 < simplex.size(); ++i)
            for (std::size_t d = 0; d < dims; ++d) centroid[d] += simplex[i].u[d] / static_cast<double>(dims);
        const Vertex& worst = simplex.back();
        const double second = simplex[simplex.size() - 2].value;

        auto ur = toward(centroid, worst.u, -1.0);
        Vertex vr = eval(ur, params_of(ur));
        if (vr.value > simplex.front().value) {
            if (!budget_left()) {
                simplex.back() = vr;
                break;
            }
            auto ue = toward(centroid, worst.u, -2.0);
            Vertex ve = eval(ue, params_of(ue));
            simplex.back() = ve.value > vr.value ? ve : vr;
            continue;
        }
        if (vr.value > second) {
            simplex.back() = vr;
            continue;
        }
        if (!budget_left()) break;
        const bool outside = vr.value > worst.value;
        auto uc = outside ? toward(centroid, vr.u, 0.5) : toward(centroid, worst.u, 0.5);
        Vertex vc = eval(uc, params_of(uc));
        if (outside ? vc.value >= vr.value : vc.value > worst.value) {
            simplex.back() = vc;
            continue;
        }
        // Shrink toward the best vertex.
        for (std::size_t i = 1; i < simplex.size(); ++i) {
            if (!budget_left()) {
                exhausted = true;
                break;
            }
            auto us = toward(simplex[0].u, simplex[i].u, 0.5);
            simplex[i] = eval(us, params_of(us));
        }
    }

    res.evaluations = res.trace.size();
    res.best = res.trace[best_trace].params;
    res.best_value = res.trace[best_trace].value;
    return res;
}

double reference_frequency(const NetworkSpec& spec) {
    double k = 0.0, m = 0.0;
    for (const auto& e : spec.edges) k += e.k;
    for (double v : spec.masses) m += v;
    if (spec.edges.empty() || spec.masses.empty())
        throw Error(ErrorKind::validation, kModule, "network needs edges and masses");
    k /= static_cast<double>(spec.edges.size());
    m /= static_cast<double>(spec.masses.size());
    return std::sqrt(k / m);
}

TuneResult tune_cavity(const NetworkSpec& spec, const std::vector<ExcitationRecipe>& excitations,
                       double t_final, const TuneOptions& options) {
    if (!spec.cavity) throw Error(ErrorKind::validation, kModule, "tune_cavity needs an attached cavity");
    if (options.grid == 0) throw Error(ErrorKind::validation, kModule, "grid must be >= 1");
    const double w0 = reference_frequency(spec);
    double m_mean = 0.0;
    for (double v : spec.masses) m_mean += v;
    m_mean /= static_cast<double>(spec.masses.size());

    ObjectiveSpec objective;
    objective.base = spec;
    objective.excitations = excitations;
    objective.t_final = t_final;
    objective.sample_dt = options.sample_dt;
    objective.metric = options.metric;
    using Kind = FreeParameter::Kind;
    objective.free = {
        {Kind::cavity_omega, 0, options.omega_lower * w0, options.omega_upper * w0, false},
        {Kind::cavity_mass, 0, options.mass_lower * m_mean, options.mass_upper * m_mean, true},
    };
    const auto problem = make_problem(objective);

    TuneResult out;
    const std::vector<std::size_t> res{options.grid, options.grid};
    out.grid = grid_search(problem, res, options.jobs);
    out.refined = refine_nelder_mead(problem, out.grid.best, options.refine);
    out.omega = out.refined.best[0];
    out.mass = out.refined.best[1];
    out.spring = out.mass * out.omega * out.omega;
    out.metric_value = out.refined.best_value;

    double eta = 0.0, trap = 0.0;
    for (const auto& exc : excitations) {
        const auto rep = cavity_capture(spec, exc, out.spring, out.mass, t_final, options.sample_dt);
        eta += rep.eta;
        trap += rep.trap_duration;
    }
    out.eta = eta / static_cast<double>(excitations.size());
    out.trap_duration = trap / static_cast<double>(excitations.size());
    return out;
}

std::vector<TopologyEntry> enumerate_topologies(const EnumerateOptions& options) {
    if (options.n > graphs::max_nodes)
        throw Error(ErrorKind::guard, kModule, "enumerate_topologies is limited to n <= 8");
    if (options.n < 2) throw Error(ErrorKind::validation, kModule, "enumeration needs n >= 2");
    if (options.min_edges > options.max_edges)
        throw Error(ErrorKind::validation, kModule, "edge budget range is empty");

    std::vector<TopologyEntry> entries;
    for (const auto& g : graphs::connected_graphs(options.n, options.min_edges, options.max_edges)) {
        const auto canon = graphs::canonical_form(g);
        std::vector<lattice::Edge> edges;
        for (auto [i, j] : g.edges()) edges.push_back({i, j, options.k});
        const auto base = lattice::build_custom(std::vector<double>(options.n, options.m),
                                                std::vector<double>(options.n, 0.0), edges,
                                                lattice::Boundary::free);
        for (std::size_t target : graphs::orbit_representatives(canon)) {
            const auto spec = lattice::attach_cavity(base, target, options.m, 0.0);
            std::vector<ExcitationRecipe> exc;
            if (options.policy == ExcitationPolicy::farthest) {
                const auto dist = lattice::graph_distances(base, target);
                std::size_t far = target == 0 ? 1 : 0;
                for (std::size_t v = 0; v < options.n; ++v)
                    if (v != target && dist[v] > dist[far]) far = v;
                exc.push_back(ExcitationRecipe::at_site(far));
            } else {
                for (std::size_t v = 0; v < options.n; ++v)
                    if (v != target) exc.push_back(ExcitationRecipe::at_site(v));
            }
            const auto tuned = tune_cavity(spec, exc, options.horizon_per_node * static_cast<double>(options.n),
                                           options.tune);
            TopologyEntry e;
            e.graph6 = graphs::to_graph6(g);
            e.edge_list = graphs::edge_list_string(g);
            e.n = options.n;
            e.edges = g.edge_count();
            e.target = target;
            e.eta = tuned.eta;
            e.spring = tuned.spring;
            e.mass = tuned.mass;
            e.omega = tuned.omega;
            entries.push_back(std::move(e));
        }
    }
    std::stable_sort(entries.begin(), entries.end(), [](const TopologyEntry& a, const TopologyEntry& b) {
        if (a.eta != b.eta) return a.eta > b.eta;
        if (a.graph6 != b.graph6) return a.graph6 < b.graph6;
        return a.target < b.target;
    });
    if (entries.size() > options.top) entries.resize(options.top);
    return entries;
}

} // namespace wavesearch::optimize
