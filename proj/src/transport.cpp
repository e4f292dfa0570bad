#include "wavesearch/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "wavesearch/error.hpp"
#include "wavesearch/optimize.hpp"
#include "wavesearch/parallel.hpp"

namespace wavesearch::transport {

namespace {

const char* const kModule = "transport";

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct UniformChain {
    std::size_t n = 0;
    double m = 1.0;
    double k = 1.0;
    double k0 = 0.0;
};

// Uniform chain parameters, wall spring removed from node 0 when fixed_left.
UniformChain uniform_chain(const NetworkSpec& spec) {
    lattice::require_valid(spec);
    if (spec.cavity) throw Error(ErrorKind::validation, kModule, "chain must not carry a cavity");
    if (lattice::topology_of(spec) != lattice::Topology::chain)
        throw Error(ErrorKind::validation, kModule, "a chain ordering is required");
    if (spec.boundary != lattice::Boundary::fixed_left && spec.boundary != lattice::Boundary::free)
        throw Error(ErrorKind::validation, kModule, "boundary must be fixed_left or free");
    if (spec.node_count < 2) throw Error(ErrorKind::validation, kModule, "chain needs at least 2 nodes");

    UniformChain c;
    c.n = spec.node_count;
    c.m = spec.masses[0];
    c.k = spec.edges[0].k;
    c.k0 = spec.onsite_springs[1];
    const double wall = spec.boundary == lattice::Boundary::fixed_left ? c.k : 0.0;
    bool uniform = spec.onsite_springs[0] == c.k0 + wall;
    for (std::size_t i = 0; i < c.n; ++i) {
        uniform = uniform && spec.masses[i] == c.m;
        if (i > 0) uniform = uniform && spec.onsite_springs[i] == c.k0;
    }
    for (const auto& e : spec.edges) uniform = uniform && e.k == c.k;
    if (!uniform) throw Error(ErrorKind::validation, kModule, "chain must be uniform");
    return c;
}

} // namespace

dynamics::Excitation excite(const StiffnessSystem& system, const ModeBasis& modes,
                            const ExcitationRecipe& recipe) {
    if (recipe.kind == ExcitationRecipe::Kind::site)
        return dynamics::init_site_excitation(system, recipe.site, recipe.energy);
    return dynamics::init_pulse(system, modes, recipe.pulse);
}

// ---------------------------------------------------------------- capture

CaptureReport capture_from_series(std::span<const double> cavity_energy, double t0, double dt,
                                  double initial_energy) {
    if (!(initial_energy > 0.0))
        throw Error(ErrorKind::validation, kModule, "initial energy must be positive");
    CaptureReport rep;
    rep.times.resize(cavity_energy.size());
    rep.capture_curve.resize(cavity_energy.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < cavity_energy.size(); ++i) {
        rep.times[i] = t0 + static_cast<double>(i) * dt;
        rep.capture_curve[i] = cavity_energy[i] / initial_energy;
        if (rep.capture_curve[i] > rep.capture_curve[best]) best = i;
    }
    if (cavity_energy.empty()) return rep;
    rep.eta = std::clamp(rep.capture_curve[best], 0.0, 1.0);
    rep.t_peak = rep.times[best];
    if (rep.eta > 0.0) {
        const double half = 0.5 * rep.capture_curve[best];
        std::size_t lo = best, hi = best;
        while (lo > 0 && rep.capture_curve[lo - 1] >= half) --lo;
        while (hi + 1 < rep.capture_curve.size() && rep.capture_curve[hi + 1] >= half) ++hi;
        rep.trap_duration = rep.times[hi] - rep.times[lo];
    }
    return rep;
}

CaptureReport capture_report(const StiffnessSystem& system, const Trajectory& trajectory,
                             Window window) {
    if (!system.has_cavity())
        throw Error(ErrorKind::validation, kModule, "capture needs a cavity-bearing system");
    if (trajectory.ledgers.empty()) throw Error(ErrorKind::validation, kModule, "empty trajectory");
    const double e0 = trajectory.ledgers.front().total;
    std::vector<double> energy;
    double t0 = 0.0;
    for (const auto& led : trajectory.ledgers) {
        if (led.time < window.t_begin || led.time > window.t_end) continue;
        if (energy.empty()) t0 = led.time;
        energy.push_back(led.cavity_energy);
    }
    return capture_from_series(energy, t0,
                               trajectory.dt * static_cast<double>(trajectory.record_stride), e0);
}

CaptureReport exact_capture(const StiffnessSystem& system, const ModeBasis& modes,
                            const State& state0, double t_final, double sample_dt) {
    if (!system.has_cavity())
        throw Error(ErrorKind::validation, kModule, "capture needs a cavity-bearing system");
    if (!(sample_dt > 0.0) || !(t_final >= 0.0))
        throw Error(ErrorKind::validation, kModule, "need sample_dt > 0 and t_final >= 0");
    const auto count = static_cast<std::size_t>(std::floor(t_final / sample_dt + 1e-9)) + 1;
    dynamics::ModalPropagator prop(system, modes, state0);
    const auto series = prop.cavity_energy_series(system, sample_dt, count);
    return capture_from_series(series, state0.time, sample_dt, dynamics::hamiltonian(system, state0));
}

// ---------------------------------------------------------------- hard-wall oracle

ImagesSetup images_setup(const NetworkSpec& chain_spec, const PulseParams& pulse) {
    const auto c = uniform_chain(chain_spec);
    if (chain_spec.boundary != lattice::Boundary::fixed_left)
        throw Error(ErrorKind::validation, kModule, "method of images needs a fixed_left wall");

    ImagesSetup setup;
    setup.physical_nodes = c.n;
    setup.wall_index = c.n;
    setup.doubled = lattice::assemble(lattice::build_chain(2 * c.n + 1, c.m, c.k, c.k0,
                                                           lattice::Boundary::free));
    setup.modes = modes::normal_modes(setup.doubled);

    PulseParams shifted = pulse;
    shifted.center = pulse.center + static_cast<double>(c.n + 1);
    const auto original = dynamics::init_pulse(setup.doubled, setup.modes, shifted).state;
    const std::size_t last = 2 * c.n;
    setup.state0 = original;
    for (std::size_t j = 0; j <= last; ++j) {
        setup.state0.x[j] = original.x[j] - original.x[last - j];
        setup.state0.p[j] = original.p[j] - original.p[last - j];
    }
    return setup;
}

State images_doubled_state(const ImagesSetup& setup, double t) {
    return dynamics::evolve_exact(setup.doubled, setup.modes, setup.state0, t);
}

State images_restrict(const ImagesSetup& setup, const State& doubled) {
    State out;
    out.time = doubled.time;
    const auto first = static_cast<std::ptrdiff_t>(setup.wall_index + 1);
    out.x.assign(doubled.x.begin() + first, doubled.x.end());
    out.p.assign(doubled.p.begin() + first, doubled.p.end());
    return out;
}

State images_reference(const NetworkSpec& chain_spec, const PulseParams& pulse, double t) {
    const auto setup = images_setup(chain_spec, pulse);
    return images_restrict(setup, images_doubled_state(setup, t));
}

FidelityReport reflection_fidelity(const NetworkSpec& chain_spec, const PulseParams& pulse) {
    const auto c = uniform_chain(chain_spec);
    if (pulse.direction != -1)
        throw Error(ErrorKind::validation, kModule, "pulse must travel toward node 0 (direction -1)");

    FidelityReport rep;
    rep.wall = chain_spec.boundary == lattice::Boundary::fixed_left;
    const double vg = modes::group_velocity(c.k, c.m, pulse.q0);
    const double omega = modes::chain_dispersion(c.k, c.m, pulse.q0);
    // Distance from the centre to the reflection plane.
    const double dist = rep.wall ? pulse.center + 1.0 : pulse.center + 0.5;
    rep.t_eval = 2.0 * dist / vg;

    const auto system = lattice::assemble(chain_spec);
    State reflected;
    if (rep.wall) {
        reflected = images_reference(chain_spec, pulse, rep.t_eval);
    } else {
        const auto basis = modes::normal_modes(system);
        const auto s0 = dynamics::init_pulse(system, basis, pulse).state;
        reflected = dynamics::evolve_exact(system, basis, s0, rep.t_eval);
    }

    const auto ledger = dynamics::energy_ledger(system, reflected);
    const auto e = ledger.site_energy();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < c.n; ++i) {
        num += static_cast<double>(i) * e[i];
        den += e[i];
    }
    rep.centroid = den > 0.0 ? num / den : 0.0;
    const double arrival = dist / vg;
    if (!(rep.centroid >= 0.5 * pulse.center) || rep.t_eval <= arrival)
        throw Error(ErrorKind::validation, kModule,
                    "packet has not reflected yet (centroid " + fmt(rep.centroid) + ")");

    const double phase = 2.0 * dist * (pulse.q0 - omega / vg);
    double dot_xr = 0.0, xx = 0.0, rr = 0.0;
    for (std::size_t i = 0; i < c.n; ++i) {
        const double dn = static_cast<double>(i) - pulse.center;
        const double g = std::exp(-dn * dn / (4.0 * pulse.width * pulse.width));
        const double ref = g * std::cos(pulse.q0 * dn + phase);
        dot_xr += reflected.x[i] * ref;
        xx += reflected.x[i] * reflected.x[i];
        rr += ref * ref;
    }
    if (xx == 0.0 || rr == 0.0) throw Error(ErrorKind::validation, kModule, "zero-amplitude packet");
    rep.overlap = std::clamp(dot_xr / std::sqrt(xx * rr), -1.0, 1.0);
    rep.distortion = 1.0 - std::abs(rep.overlap);
    return rep;
}

// ---------------------------------------------------------------- beam splitter

TransmissionResult time_domain_transmission(double k, double m, const TransmissionProbe& probe) {
    if (!(probe.cavity_site > probe.center) || probe.cavity_site + 1 >= probe.chain_nodes)
        throw Error(ErrorKind::validation, kModule, "cavity must sit right of the packet, inside the chain");
    TransmissionResult res;
    res.omega = modes::chain_dispersion(k, m, probe.q0);
    const double spring = probe.cavity_mass * res.omega * res.omega;
    const auto spec = lattice::attach_cavity(
        lattice::build_chain(probe.chain_nodes, m, k, 0.0, lattice::Boundary::free), probe.cavity_site,
        probe.cavity_mass, spring);
    const auto system = lattice::assemble(spec);
    const auto basis = modes::normal_modes(system);
    const auto s0 = dynamics::init_pulse(system, basis, {probe.center, probe.width, probe.q0, 1.0, 1}).state;
    const double e0 = dynamics::hamiltonian(system, s0);

    const double vg = modes::group_velocity(k, m, probe.q0);
    res.t_eval = 2.0 * (static_cast<double>(probe.cavity_site) - probe.center) / vg;
    const auto st = dynamics::evolve_exact(system, basis, s0, res.t_eval);
    const auto e = dynamics::energy_ledger(system, st).site_energy();
    for (std::size_t i = 0; i < probe.chain_nodes; ++i) {
        if (i > probe.cavity_site) res.transmitted += e[i];
        if (i < probe.cavity_site) res.reflected += e[i];
    }
    res.transmitted /= e0;
    res.reflected /= e0;
    res.predicted_s2 = std::norm(modes::side_branch_scattering(k, m, spring, probe.cavity_mass, res.omega).s);
    return res;
}

// ---------------------------------------------------------------- resonance scan

std::vector<double> wavenumber_grid(std::size_t n, double k, double m) {
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        grid[i] = modes::chain_dispersion(k, m, q);
    }
    return grid;
}

std::vector<ScanPeak> find_peaks(std::span<const double> x, std::span<const double> y) {
    std::vector<ScanPeak> peaks;
    if (y.empty()) return peaks;
    const double ymax = *std::max_element(y.begin(), y.end());
    const double floor = 0.05 * ymax;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(y.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (!(y[i] > floor)) continue;
        bool is_max = true;
        for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - 2); j <= std::min(n - 1, i + 2); ++j) {
            if (j < i && !(y[i] > y[j])) is_max = false;
            if (j > i && !(y[i] >= y[j])) is_max = false;
        }
        if (!is_max) continue;
        ScanPeak pk{static_cast<std::size_t>(i), x[i], y[i]};
        if (i > 0 && i + 1 < n) {
            const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
            const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
            const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
            const double a = (d12 - d01) / (x2 - x0);
            if (a < 0.0) {
                const double b = d01 - a * (x0 + x1);
                pk.omega = std::clamp(-b / (2.0 * a), std::min(x0, x2), std::max(x0, x2));
            }
        }
        peaks.push_back(pk);
    }
    return peaks;
}

ScanResult resonance_scan(const NetworkSpec& base, std::span<const double> omega_grid,
                          const ExcitationRecipe& recipe, const ScanOptions& options) {
    lattice::require_connected(base);
    if (omega_grid.empty()) throw Error(ErrorKind::validation, kModule, "empty frequency grid");
    const double band = 2.0 * std::sqrt(options.k / options.m);
    const NetworkSpec bare = lattice::detach_cavity(base);

    ScanResult out;
    out.points.resize(omega_grid.size());
    parallel_for(omega_grid.size(), options.jobs, [&](std::size_t i) {
        auto& pt = out.points[i];
        pt.omega = omega_grid[i];
        if (!(pt.omega > 0.0) || !std::isfinite(pt.omega))
            throw Error(ErrorKind::validation, kModule, "scan frequencies must be positive");
        pt.in_band = pt.omega < band;
        pt.spring = options.cavity_mass * pt.omega * pt.omega;
        pt.capture = optimize::cavity_capture(lattice::attach_cavity(bare, options.target,
                                                                     options.cavity_mass, 0.0),
                                              recipe, pt.spring, options.cavity_mass,
                                              options.t_final, options.sample_dt);
    });

    std::vector<double> xs, ys;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        if (!out.points[i].in_band) continue;
        xs.push_back(out.points[i].omega);
        ys.push_back(out.points[i].capture.eta);
        idx.push_back(i);
    }
    for (auto pk : find_peaks(xs, ys)) {
        pk.index = idx[pk.index];
        out.peaks.push_back(pk);
    }
    return out;
}

// ---------------------------------------------------------------- hopping baseline

HoppingSystem make_hopping(const NetworkSpec& spec, double hop_rate, std::vector<double> initial,
                           std::optional<std::size_t> sink_site, double sink_rate) {
    lattice::require_valid(spec);
    if (!(hop_rate > 0.0)) throw Error(ErrorKind::validation, kModule, "hop rate must be positive");
    if (!(sink_rate >= 0.0)) throw Error(ErrorKind::validation, kModule, "sink rate must be >= 0");
    if (initial.size() != spec.node_count)
        throw Error(ErrorKind::validation, kModule, "initial occupation needs one entry per node");
    for (double v : initial)
        if (!(v >= 0.0)) throw Error(ErrorKind::validation, kModule, "occupations must be >= 0");
    if (sink_site && *sink_site >= spec.node_count)
        throw Error(ErrorKind::range, kModule, "sink site out of range");
    HoppingSystem h;
    h.neighbours = lattice::adjacency(spec);
    h.hop_rate = hop_rate;
    h.sink_site = sink_site;
    h.sink_rate = sink_site ? sink_rate : 0.0;
    h.occupation = std::move(initial);
    return h;
}

double hopping_stability_limit(const HoppingSystem& system) {
    std::size_t max_degree = 0;
    for (const auto& nb : system.neighbours) max_degree = std::max(max_degree, nb.size());
    const double rate = system.hop_rate * static_cast<double>(max_degree) + system.sink_rate;
    return rate > 0.0 ? 0.1 / rate : std::numeric_limits<double>::infinity();
}

HoppingResult hopping_baseline(const HoppingSystem& system, double t_final, double dt,
                               std::size_t record_stride, bool keep_occupations) {
    if (!(dt > 0.0) || !(t_final >= 0.0) || record_stride == 0)
        throw Error(ErrorKind::validation, kModule, "need dt > 0, t_final >= 0, record_stride >= 1");
    const double limit = hopping_stability_limit(system);
    if (dt > limit * (1.0 + 1e-12))
        throw Error(ErrorKind::guard, kModule,
                    "dt = " + fmt(dt) + " violates the hopping stability guard dt <= " + fmt(limit));

    const std::size_t n = system.occupation.size();
    auto rhs = [&](const std::vector<double>& p, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            double flow = 0.0;
            for (auto j : system.neighbours[i]) flow += p[j] - p[i];
            out[i] = system.hop_rate * flow;
        }
        out[n] = 0.0;
        if (system.sink_site) {
            out[*system.sink_site] -= system.sink_rate * p[*system.sink_site];
            out[n] = system.sink_rate * p[*system.sink_site];
        }
    };

    HoppingResult res;
    res.dt = dt;
    res.record_stride = record_stride;
    for (double v : system.occupation) res.initial_total += v;
    // Slot n accumulates the absorbed population.
    std::vector<double> p = system.occupation, k1(n + 1), k2(n + 1), k3(n + 1), k4(n + 1), tmp(n + 1);
    p.push_back(0.0);
    res.min_occupation = *std::min_element(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n));

    auto record = [&](std::size_t step) {
        for (std::size_t i = 0; i < n; ++i) res.min_occupation = std::min(res.min_occupation, p[i]);
        if (res.min_occupation < 0.0)
            throw Error(ErrorKind::numerical, kModule, "negative occupation in hopping baseline");
        res.times.push_back(static_cast<double>(step) * dt);
        res.absorbed.push_back(p[n]);
        if (keep_occupations) res.occupations.emplace_back(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n));
    };

    const auto steps = static_cast<std::size_t>(std::llround(t_final / dt));
    record(0);
    for (std::size_t step = 1; step <= steps; ++step) {
        rhs(p, k1);
        for (std::size_t i = 0; i <= n; ++i) tmp[i] = p[i] + 0.5 * dt * k1[i];
        rhs(tmp, k2);
        for (std::size_t i = 0; i <= n; ++i) tmp[i] = p[i] + 0.5 * dt * k2[i];
        rhs(tmp, k3);
        for (std::size_t i = 0; i <= n; ++i) tmp[i] = p[i] + dt * k3[i];
        rhs(tmp, k4);
        for (std::size_t i = 0; i <= n; ++i)
            p[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (step % record_stride == 0) record(step);
    }
    return res;
}

// ---------------------------------------------------------------- spreading

double distribution_width(std::span<const double> weights, double origin) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double d = static_cast<double>(i) - origin;
        num += d * d * weights[i];
        den += weights[i];
    }
    if (!(den > 0.0)) throw Error(ErrorKind::validation, kModule, "empty distribution");
    return std::sqrt(num / den);
}

namespace {
double edge_share(std::span<const double> w) {
    double total = 0.0;
    for (double v : w) total += v;
    return total > 0.0 ? std::max(w.front(), w.back()) / total : 0.0;
}
} // namespace

WidthCurve wave_width_curve(const StiffnessSystem& system, const ModeBasis& modes,
                            const State& state0, std::span<const double> times, double origin) {
    dynamics::ModalPropagator prop(system, modes, state0);
    WidthCurve curve;
    for (double t : times) {
        const auto e = dynamics::energy_ledger(system, prop.at(state0.time + t)).site_energy();
        std::span<const double> nodes(e.data(), system.node_count);
        curve.times.push_back(t);
        curve.sigma.push_back(distribution_width(nodes, origin));
        curve.edge_share.push_back(edge_share(nodes));
    }
    return curve;
}

WidthCurve hopping_width_curve(const HoppingResult& result, std::span<const double> times,
                               double origin) {
    if (result.occupations.empty())
        throw Error(ErrorKind::validation, kModule, "hopping result has no stored occupations");
    const double spacing = result.dt * static_cast<double>(result.record_stride);
    WidthCurve curve;
    for (double t : times) {
        const auto i = static_cast<std::size_t>(std::llround(t / spacing));
        if (i >= result.occupations.size())
            throw Error(ErrorKind::range, kModule, "requested time beyond the hopping record");
        const auto& occ = result.occupations[i];
        curve.times.push_back(result.times[i]);
        curve.sigma.push_back(distribution_width(occ, origin));
        curve.edge_share.push_back(edge_share(occ));
    }
    return curve;
}

std::vector<double> log_times(double t_begin, double t_end, std::size_t count) {
    if (!(t_begin > 0.0) || !(t_end > t_begin) || count < 2)
        throw Error(ErrorKind::validation, kModule, "need 0 < t_begin < t_end and count >= 2");
    std::vector<double> t(count);
    const double ratio = std::log(t_end / t_begin);
    for (std::size_t i = 0; i < count; ++i)
        t[i] = t_begin * std::exp(ratio * static_cast<double>(i) / static_cast<double>(count - 1));
    return t;
}

double spreading_exponent(const WidthCurve& curve) {
    const std::size_t n = curve.times.size();
    if (n < 10 || curve.sigma.size() != n)
        throw Error(ErrorKind::validation, kModule, "need at least 10 width samples");
    for (std::size_t i = 0; i < n; ++i)
        if (!(curve.times[i] > 0.0) || !(curve.sigma[i] > 0.0))
            throw Error(ErrorKind::validation, kModule, "times and widths must be positive for a log fit");
    if (curve.times.back() / curve.times.front() < 10.0 * (1.0 - 1e-12))
        throw Error(ErrorKind::validation, kModule, "width curve must span at least one decade of time");
    for (double share : curve.edge_share)
        if (share > 1e-6)
            throw Error(ErrorKind::validation, kModule, "boundary contact: distribution reached an end node");
    const auto [lo, hi] = std::minmax_element(curve.sigma.begin(), curve.sigma.end());
    if (*hi - *lo <= 1e-9 * *hi) throw Error(ErrorKind::validation, kModule, "no spreading");

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(curve.times[i]), y = std::log(curve.sigma[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

// ---------------------------------------------------------------- scaling

ScalingStudy scaling_study(std::span<const std::size_t> ring_sizes, const ScalingOptions& options) {
    if (ring_sizes.empty()) throw Error(ErrorKind::validation, kModule, "no ring sizes given");
    const double band = 2.0 * std::sqrt(options.k / options.m);
    ScalingStudy study;
    for (std::size_t n : ring_sizes) {
        const auto spec = lattice::attach_cavity(lattice::build_ring(n, options.m, options.k, 0.0), 0,
                                                 options.m, 0.0);
        const std::vector<ExcitationRecipe> exc{ExcitationRecipe::at_site(n / 2)};
        const double horizon = options.horizon_per_node * static_cast<double>(n);

        optimize::TuneOptions tune;
        tune.grid = options.grid;
        tune.sample_dt = options.sample_dt;
        tune.jobs = options.jobs;
        tune.refine.max_evals = options.refine_evals;
        const auto tuned = optimize::tune_cavity(spec, exc, horizon, tune);

        ScalingRow row;
        row.n = n;
        row.omega = tuned.omega;
        row.cavity_mass = tuned.mass;
        row.cavity_spring = tuned.spring;
        row.eta_tuned = tuned.eta;
        row.omega_detuned = tuned.omega * (1.0 + options.detune);
        if (row.omega_detuned >= band) row.omega_detuned = tuned.omega * (1.0 - options.detune);
        row.eta_detuned = optimize::cavity_capture(spec, exc[0], tuned.mass * row.omega_detuned * row.omega_detuned,
                                                   tuned.mass, horizon, options.sample_dt)
                              .eta;
        row.eta_uncoupled =
            optimize::cavity_capture(spec, exc[0], 0.0, tuned.mass, horizon, options.sample_dt).eta;
        row.uniform_share = 1.0 / static_cast<double>(n);
        study.rows.push_back(row);
    }

    study.floor_ok = std::all_of(study.rows.begin(), study.rows.end(), [](const ScalingRow& r) {
        return r.eta_tuned >= 5.0 * r.uniform_share;
    });
    study.ratio = study.rows.front().eta_tuned > 0.0
                      ? study.rows.back().eta_tuned / study.rows.front().eta_tuned
                      : 0.0;
    study.collapse_ok = study.ratio >= 0.5;
    if (!study.floor_ok || !study.collapse_ok) {
        std::string report = "O(1) accumulation not observed\n";
        report += "N, eta_tuned, 5/N, eta_detuned, floor_ok\n";
        for (const auto& r : study.rows) {
            char line[160];
            std::snprintf(line, sizeof line, "%zu, %.6f, %.6f, %.6f, %s\n", r.n, r.eta_tuned,
                          5.0 * r.uniform_share, r.eta_detuned,
                          r.eta_tuned >= 5.0 * r.uniform_share ? "yes" : "no");
            report += line;
        }
        char tail[96];
        std::snprintf(tail, sizeof tail, "eta ratio last/first = %.6f (need >= 0.5)\n", study.ratio);
        report += tail;
        study.falsification = report;
    }
    return study;
}

} // namespace wavesearch::transport
