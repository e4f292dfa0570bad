#include "wavesearch/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "wavesearch/cli/output.hpp"
#include "wavesearch/dynamics.hpp"
#include "wavesearch/error.hpp"
#include "wavesearch/graphs.hpp"
#include "wavesearch/modes.hpp"
#include "wavesearch/optimize.hpp"
#include "wavesearch/transport.hpp"

namespace wavesearch::cli {

using nlohmann::json;

namespace {

const char* const kModule = "cli";

struct Schema {
    std::string command;
    std::string file;
    std::vector<std::string> columns;
};

const std::vector<Schema>& schemas() {
    static const std::vector<Schema> s{
        {"simulate", "trajectory.csv", {"time", "total", "cavity_energy", "site_0..site_{D-1}"}},
        {"dispersion", "dispersion.csv", {"q", "omega", "group_velocity"}},
        {"scattering", "scattering.csv", {"omega", "re_r", "im_r", "re_s", "im_s", "flux_error"}},
        {"scan", "scan.csv", {"omega", "K", "eta", "t_peak", "trap_duration", "in_band"}},
        {"baseline", "hopping.csv", {"time", "absorbed", "occupation_total"}},
        {"baseline", "widths.csv", {"series", "time", "sigma"}},
        {"scaling", "scaling.csv",
         {"N", "omega", "M", "K", "eta_tuned", "omega_detuned", "eta_detuned", "eta_uncoupled", "uniform_share"}},
        {"oracle-check", "oracle.csv", {"check", "value", "threshold", "pass"}},
        {"tune", "trace.csv", {"stage", "index", "Omega", "M", "value"}},
        {"enumerate", "topologies.csv",
         {"rank", "graph6", "edge_list", "n", "edges", "target", "eta", "K", "M", "Omega"}},
    };
    return s;
}

std::vector<std::string> columns_of(const std::string& file) {
    for (const auto& s : schemas())
        if (s.file == file) return s.columns;
    return {};
}

json base_summary(const RunConfig& cfg) {
    return json{{"version", tool_version}, {"command", cfg.command}, {"seed", cfg.seed}, {"config", cfg.echo}};
}

void put(Bundle& b, const RunConfig& cfg, const std::string& name, const std::string& content) {
    const bool is_csv = name.ends_with(".csv"), is_json = name.ends_with(".json"), is_svg = name.ends_with(".svg");
    if ((is_csv && !cfg.emit.csv) || (is_json && !cfg.emit.json) || (is_svg && !cfg.emit.svg)) return;
    b.files[name] = content;
}

void put_json(Bundle& b, const RunConfig& cfg, const std::string& name, const json& doc) {
    put(b, cfg, name, doc.dump(2) + "\n");
}

transport::ExcitationRecipe excitation_or(const RunConfig& cfg, transport::ExcitationRecipe fallback) {
    return cfg.has_excitation ? cfg.excitation : fallback;
}

std::size_t farthest_from(const lattice::NetworkSpec& spec, std::size_t target) {
    const auto dist = lattice::graph_distances(spec, target);
    std::size_t far = target == 0 ? 1 : 0;
    for (std::size_t v = 0; v < spec.node_count; ++v)
        if (v != target && dist[v] > dist[far]) far = v;
    return far;
}

json capture_json(const transport::CaptureReport& r) {
    return json{{"eta", r.eta}, {"t_peak", r.t_peak}, {"trap_duration", r.trap_duration}};
}

// ------------------------------------------------------------------ simulate

Bundle cmd_simulate(const RunConfig& cfg, const ExecOptions& opt) {
    const auto& p = cfg.simulate;
    auto spec = network_with_cavity(cfg);
    lattice::require_connected(spec);
    json summary = base_summary(cfg);
    json results;

    const auto default_site = spec.cavity ? farthest_from(spec, spec.cavity->target_site) : 0;
    const auto recipe = excitation_or(cfg, transport::ExcitationRecipe::at_site(default_site));

    if (cfg.cavity.tune) {
        if (!spec.cavity) throw Error(ErrorKind::config, kModule, "cavity.tune needs a cavity section");
        optimize::TuneOptions tune = cfg.tune.options;
        tune.jobs = opt.jobs;
        const double horizon = cfg.tune.t_final > 0.0 ? cfg.tune.t_final : p.t_final;
        const auto tuned = optimize::tune_cavity(spec, {recipe}, horizon, tune);
        spec.cavity->spring = tuned.spring;
        spec.cavity->mass = tuned.mass;
        results["tuned_cavity"] = {{"omega", tuned.omega}, {"M", tuned.mass}, {"K", tuned.spring},
                                   {"eta", tuned.eta}, {"horizon", horizon}};
    }

    const auto system = lattice::assemble(spec);
    const auto basis = modes::normal_modes(system);
    const auto exc = transport::excite(system, basis, recipe);
    const double dt = p.dt > 0.0 ? p.dt : 0.05 / basis.max_frequency();

    dynamics::Trajectory traj;
    if (p.integrator == "verlet") {
        traj = dynamics::run(system, basis, exc.state, {dt, p.t_final, p.gamma, p.record_stride, false});
    } else {
        if (p.gamma != 0.0) throw Error(ErrorKind::config, kModule, "exact integrator needs gamma = 0");
        if (!(dt > 0.0) || p.record_stride == 0) throw Error(ErrorKind::config, kModule, "invalid dt or stride");
        traj.dt = dt;
        traj.record_stride = p.record_stride;
        traj.steps = static_cast<std::size_t>(std::llround(p.t_final / dt));
        dynamics::ModalPropagator prop(system, basis, exc.state);
        for (std::size_t s = 0; s <= traj.steps; s += p.record_stride)
            traj.ledgers.push_back(dynamics::energy_ledger(system, prop.at(static_cast<double>(s) * dt)));
    }

    std::vector<std::string> cols{"time", "total", "cavity_energy"};
    for (std::size_t i = 0; i < system.dimension; ++i) cols.push_back("site_" + std::to_string(i));
    CsvTable csv(cols);
    const double e0 = traj.ledgers.front().total;
    double drift = 0.0;
    std::vector<double> ts, share;
    for (const auto& led : traj.ledgers) {
        std::vector<std::string> row{cell(led.time), cell(led.total), cell(led.cavity_energy)};
        for (double e : led.site_energy()) row.push_back(cell(e));
        csv.row(std::move(row));
        if (e0 > 0.0) drift = std::max(drift, std::abs(led.total - e0) / e0);
        ts.push_back(led.time);
        share.push_back(e0 > 0.0 ? (spec.cavity ? led.cavity_energy : led.total) / e0 : 0.0);
    }
    Bundle b;
    put(b, cfg, "trajectory.csv", csv.str());

    results["dt"] = dt;
    results["steps"] = traj.steps;
    results["omega_max"] = basis.max_frequency();
    results["initial_energy"] = e0;
    results["final_energy"] = traj.ledgers.back().total;
    results["max_relative_energy_deviation"] = drift;
    if (spec.cavity) results["capture"] = capture_json(transport::capture_report(system, traj));
    if (p.calibrate_fs) {
        const double w0 = optimize::reference_frequency(spec);
        const double fs = dynamics::fs_per_time_unit(w0 * w0, 1.0);
        results["fs_per_time_unit"] = fs;
        results["t_final_fs"] = fs * static_cast<double>(traj.steps) * dt;
    }
    summary["results"] = results;
    json warnings = json::array();
    for (const auto& w : exc.warnings) warnings.push_back(w);
    for (const auto& w : traj.warnings) warnings.push_back(w);
    summary["warnings"] = warnings;
    put_json(b, cfg, "summary.json", summary);
    put(b, cfg, "trajectory.svg",
        emit_svg({{spec.cavity ? "cavity share" : "total energy / E0", ts, share, ""}},
                 {"Energy ledger", "time", spec.cavity ? "cavity energy / E0" : "E / E0", false, false, {}}));
    return b;
}

// ------------------------------------------------------------------ dispersion, scattering

Bundle cmd_dispersion(const RunConfig& cfg) {
    const auto& p = cfg.dispersion;
    if (p.points < 2) throw Error(ErrorKind::config, kModule, "dispersion.points must be >= 2");
    CsvTable csv(columns_of("dispersion.csv"));
    std::vector<double> qs, ws, vs;
    for (std::size_t j = 0; j < p.points; ++j) {
        const double q = std::numbers::pi * static_cast<double>(j) / static_cast<double>(p.points - 1);
        const double w = modes::chain_dispersion(p.k, p.m, q), v = modes::group_velocity(p.k, p.m, q);
        csv.row({cell(q), cell(w), cell(v)});
        qs.push_back(q);
        ws.push_back(w);
        vs.push_back(v);
    }
    Bundle b;
    put(b, cfg, "dispersion.csv", csv.str());
    json summary = base_summary(cfg);
    summary["results"] = {{"band_top", 2.0 * std::sqrt(p.k / p.m)}, {"max_group_velocity", std::sqrt(p.k / p.m)}};
    put_json(b, cfg, "summary.json", summary);
    put(b, cfg, "dispersion.svg",
        emit_svg({{"omega(q)", qs, ws, ""}, {"group velocity", qs, vs, ""}},
                 {"Chain dispersion", "q", "omega, v", false, false, {}}));
    return b;
}

Bundle cmd_scattering(const RunConfig& cfg) {
    const auto& p = cfg.scattering;
    if (p.points < 1) throw Error(ErrorKind::config, kModule, "scattering.points must be >= 1");
    const double band = 2.0 * std::sqrt(p.k / p.m);
    CsvTable csv(columns_of("scattering.csv"));
    std::vector<double> ws, r2, s2;
    double worst = 0.0;
    for (std::size_t i = 0; i < p.points; ++i) {
        const double w = band * (static_cast<double>(i) + 0.5) / static_cast<double>(p.points);
        const auto sc = modes::side_branch_scattering(p.k, p.m, p.K, p.M, w);
        csv.row({cell(w), cell(sc.r.real()), cell(sc.r.imag()), cell(sc.s.real()), cell(sc.s.imag()),
                 cell(sc.flux_error())});
        worst = std::max(worst, sc.flux_error());
        ws.push_back(w);
        r2.push_back(std::norm(sc.r));
        s2.push_back(std::norm(sc.s));
    }
    Bundle b;
    put(b, cfg, "scattering.csv", csv.str());
    json summary = base_summary(cfg);
    const double omega_c = std::sqrt(p.K / p.M);
    summary["results"] = {{"max_flux_error", worst}, {"cavity_omega", omega_c}};
    put_json(b, cfg, "summary.json", summary);
    std::vector<double> marks;
    if (omega_c > 0.0 && omega_c < band) marks.push_back(omega_c);
    put(b, cfg, "scattering.svg",
        emit_svg({{"|r|^2", ws, r2, ""}, {"|s|^2", ws, s2, ""}},
                 {"Side-branch beam splitter", "omega", "power fraction", false, false, marks}));
    return b;
}

// ------------------------------------------------------------------ scan

Bundle cmd_scan(const RunConfig& cfg, const ExecOptions& opt) {
    const auto& p = cfg.scan;
    lattice::NetworkSpec base;
    std::size_t target = 0;
    if (cfg.network) {
        base = *cfg.network;
        target = cfg.cavity.site.value_or(0);
    } else {
        base = lattice::build_ring(p.ring_n, p.m, p.k, 0.0);
    }
    const bool ring = lattice::topology_of(base) == lattice::Topology::ring;
    const std::size_t site = p.excitation_site.value_or(ring ? (target + base.node_count / 2) % base.node_count
                                                             : farthest_from(base, target));
    const auto recipe = excitation_or(cfg, transport::ExcitationRecipe::at_site(site));
    const auto grid = transport::wavenumber_grid(p.points, p.k, p.m);

    transport::ScanOptions so;
    so.k = p.k;
    so.m = p.m;
    so.cavity_mass = p.cavity_mass;
    so.target = target;
    so.t_final = p.t_final;
    so.sample_dt = p.sample_dt;
    so.jobs = opt.jobs;
    const auto scan = transport::resonance_scan(base, grid, recipe, so);

    CsvTable csv(columns_of("scan.csv"));
    std::vector<double> ws, etas;
    for (const auto& pt : scan.points) {
        csv.row({cell(pt.omega), cell(pt.spring), cell(pt.capture.eta), cell(pt.capture.t_peak),
                 cell(pt.capture.trap_duration), cell(pt.in_band)});
        ws.push_back(pt.omega);
        etas.push_back(pt.capture.eta);
    }
    std::vector<double> roots;
    if (ring && !cfg.network)
        roots = modes::resonance_frequencies(p.ring_n, p.k, p.m, p.cavity_mass * p.k / p.m, p.cavity_mass);

    Bundle b;
    put(b, cfg, "scan.csv", csv.str());
    json peaks = json::array();
    for (const auto& pk : scan.peaks) peaks.push_back({{"omega", pk.omega}, {"eta", pk.eta}, {"index", pk.index}});
    json summary = base_summary(cfg);
    summary["results"] = {{"peaks", peaks}, {"resonance_roots", roots}, {"excitation_site", site},
                          {"target", target}};
    put_json(b, cfg, "summary.json", summary);
    put(b, cfg, "scan.svg",
        emit_svg({{"eta(Omega)", ws, etas, ""}},
                 {"Resonance scan", "cavity Omega", "peak capture eta", false, false, roots}));
    return b;
}

// ------------------------------------------------------------------ baseline

Bundle cmd_baseline(const RunConfig& cfg) {
    const auto& p = cfg.baseline;
    Bundle b;
    json summary = base_summary(cfg);
    json results;

    // Hopping with sink on the configured network (chain of spreading_nodes otherwise).
    const auto net = cfg.network ? *cfg.network
                                 : lattice::build_chain(p.spreading_nodes, 1.0, 1.0, 0.0, lattice::Boundary::free);
    lattice::require_connected(net);
    if (p.initial_site >= net.node_count) throw Error(ErrorKind::range, kModule, "baseline.initial_site out of range");
    std::vector<double> init(net.node_count, 0.0);
    init[p.initial_site] = 1.0;
    const auto hs = transport::make_hopping(net, p.hop_rate, init, p.sink_site, p.sink_site ? p.sink_rate : 0.0);
    const double hdt = p.dt > 0.0 ? p.dt : transport::hopping_stability_limit(hs);
    const auto hop = transport::hopping_baseline(hs, p.t_final, hdt, 1, false);
    CsvTable hcsv(columns_of("hopping.csv"));
    for (std::size_t i = 0; i < hop.times.size(); ++i)
        hcsv.row({cell(hop.times[i]), cell(hop.absorbed[i]), cell(hop.initial_total - hop.absorbed[i])});
    put(b, cfg, "hopping.csv", hcsv.str());
    results["hopping"] = {{"dt", hdt}, {"final_absorbed", hop.absorbed.back()}, {"min_occupation", hop.min_occupation}};

    // Ballistic against diffusive spreading on a long free chain.
    const std::size_t n = p.spreading_nodes;
    const double origin = static_cast<double>(n / 2);
    const auto chain = lattice::build_chain(n, 1.0, 1.0, 0.0, lattice::Boundary::free);
    const auto sys = lattice::assemble(chain);
    const auto basis = modes::normal_modes(sys);
    const auto s0 = dynamics::init_site_excitation(sys, n / 2, 1.0).state;
    const auto wave = transport::wave_width_curve(sys, basis, s0, transport::log_times(p.wave_t_begin, p.wave_t_end, p.samples),
                                                  origin);
    std::vector<double> occ(n, 0.0);
    occ[n / 2] = 1.0;
    const auto chain_hop = transport::make_hopping(chain, p.hop_rate, occ);
    const double sdt = transport::hopping_stability_limit(chain_hop);
    const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.1 * p.hop_t_begin / sdt)));
    const auto hres = transport::hopping_baseline(chain_hop, p.hop_t_end, sdt, stride, true);
    const auto diff = transport::hopping_width_curve(hres, transport::log_times(p.hop_t_begin, p.hop_t_end, p.samples),
                                                     origin);
    const double a_wave = transport::spreading_exponent(wave);
    const double a_hop = transport::spreading_exponent(diff);

    CsvTable wcsv(columns_of("widths.csv"));
    for (std::size_t i = 0; i < wave.times.size(); ++i) wcsv.row({"wave", cell(wave.times[i]), cell(wave.sigma[i])});
    for (std::size_t i = 0; i < diff.times.size(); ++i) wcsv.row({"hopping", cell(diff.times[i]), cell(diff.sigma[i])});
    put(b, cfg, "widths.csv", wcsv.str());
    results["spreading"] = {{"wave_exponent", a_wave}, {"hopping_exponent", a_hop}, {"nodes", n}};
    summary["results"] = results;
    put_json(b, cfg, "summary.json", summary);

    char wa[48], ha[48];
    std::snprintf(wa, sizeof wa, "slope %.3f", a_wave);
    std::snprintf(ha, sizeof ha, "slope %.3f", a_hop);
    put(b, cfg, "widths.svg",
        emit_svg({{"wave", wave.times, wave.sigma, wa}, {"hopping", diff.times, diff.sigma, ha}},
                 {"Spreading width", "time", "sigma", true, true, {}}));
    return b;
}

// ------------------------------------------------------------------ scaling

Bundle cmd_scaling(const RunConfig& cfg, const ExecOptions& opt) {
    auto options = cfg.scaling.options;
    options.jobs = opt.jobs;
    const auto study = transport::scaling_study(cfg.scaling.sizes, options);
    CsvTable csv(columns_of("scaling.csv"));
    std::vector<double> ns, tuned, detuned, floor;
    for (const auto& r : study.rows) {
        csv.row({cell(r.n), cell(r.omega), cell(r.cavity_mass), cell(r.cavity_spring), cell(r.eta_tuned),
                 cell(r.omega_detuned), cell(r.eta_detuned), cell(r.eta_uncoupled), cell(r.uniform_share)});
        ns.push_back(static_cast<double>(r.n));
        tuned.push_back(r.eta_tuned);
        detuned.push_back(r.eta_detuned);
        floor.push_back(5.0 * r.uniform_share);
    }
    Bundle b;
    put(b, cfg, "scaling.csv", csv.str());
    json summary = base_summary(cfg);
    summary["results"] = {{"floor_ok", study.floor_ok}, {"collapse_ok", study.collapse_ok}, {"ratio", study.ratio},
                          {"falsified", !study.falsification.empty()}};
    put_json(b, cfg, "summary.json", summary);
    if (!study.falsification.empty()) b.files["falsification.txt"] = study.falsification;
    put(b, cfg, "scaling.svg",
        emit_svg({{"eta tuned", ns, tuned, ""}, {"eta detuned", ns, detuned, ""}, {"5/N", ns, floor, ""}},
                 {"Capture against ring size", "N", "eta", true, false, {}}));
    return b;
}

// ------------------------------------------------------------------ oracle-check

Bundle cmd_oracle(const RunConfig& cfg) {
    const auto& p = cfg.oracle;
    CsvTable csv(columns_of("oracle.csv"));
    json checks = json::array();
    auto add = [&](const std::string& name, double value, double threshold, bool pass) {
        csv.row({name, cell(value), cell(threshold), cell(pass)});
        checks.push_back({{"check", name}, {"value", value}, {"threshold", threshold}, {"pass", pass}});
    };

    // Images equivalence against the direct fixed-wall propagator.
    const auto wall = lattice::build_chain(p.chain_nodes, 1.0, 1.0, 0.0, lattice::Boundary::fixed_left);
    const dynamics::PulseParams img{6.0 * p.images_width, p.images_width, p.q0, 1.0, -1};
    const auto setup = transport::images_setup(wall, img);
    const auto sys = lattice::assemble(wall);
    const auto basis = modes::normal_modes(sys);
    const auto direct0 = transport::images_restrict(setup, setup.state0);
    const double t_full = 2.0 * (img.center + 1.0) / modes::group_velocity(1.0, 1.0, p.q0);
    double worst_rms = 0.0, wall_disp = 0.0;
    for (int i = 0; i <= 8; ++i) {
        const double t = t_full * i / 8.0;
        const auto doubled = transport::images_doubled_state(setup, t);
        wall_disp = std::max(wall_disp, std::abs(doubled.x[setup.wall_index]));
        const auto ref = transport::images_restrict(setup, doubled);
        const auto dir = dynamics::evolve_exact(sys, basis, direct0, t);
        double s = 0.0;
        for (std::size_t j = 0; j < ref.x.size(); ++j) s += (ref.x[j] - dir.x[j]) * (ref.x[j] - dir.x[j]);
        worst_rms = std::max(worst_rms, std::sqrt(s / static_cast<double>(ref.x.size())));
    }
    add("images_equivalence_rms", worst_rms, 1e-9, worst_rms <= 1e-9);
    add("images_wall_displacement", wall_disp, 1e-10, wall_disp <= 1e-10);

    const dynamics::PulseParams narrow{p.center, p.width, p.q0, 1.0, -1};
    const auto fw = transport::reflection_fidelity(wall, narrow);
    add("wall_reflection_overlap", fw.overlap, -0.99, fw.overlap <= -0.99);
    const auto fr = transport::reflection_fidelity(lattice::build_chain(p.chain_nodes, 1.0, 1.0, 0.0, lattice::Boundary::free),
                                                   narrow);
    add("free_end_overlap", fr.overlap, 0.99, fr.overlap >= 0.99);
    const auto fb = transport::reflection_fidelity(wall, {p.center, 1.0, p.q0, 1.0, -1});
    add("broadband_abs_overlap", std::abs(fb.overlap), 0.99, std::abs(fb.overlap) < 0.99);

    // Beam splitter: flux over seeded draws, zero at the cavity frequency, time domain.
    dynamics::SplitMix64 rng(cfg.seed);
    double flux = 0.0, zero = 0.0;
    for (std::size_t d = 0; d < p.draws; ++d) {
        const double K = 0.1 + 4.9 * rng.uniform(), M = 0.1 + 4.9 * rng.uniform();
        for (std::size_t i = 0; i < p.band_points; ++i) {
            const double w = 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(p.band_points);
            flux = std::max(flux, modes::side_branch_scattering(1.0, 1.0, K, M, w).flux_error());
        }
        const double wc = std::sqrt(K / M);
        if (wc < 2.0) zero = std::max(zero, std::norm(modes::side_branch_scattering(1.0, 1.0, K, M, wc).s));
    }
    add("flux_conservation", flux, 1e-9, flux <= 1e-9);
    add("transmission_at_cavity_frequency", zero, 1e-6, zero <= 1e-6);
    transport::TransmissionProbe probe;
    probe.width = p.width;
    probe.q0 = p.q0;
    const auto td = transport::time_domain_transmission(1.0, 1.0, probe);
    add("time_domain_transmission", td.transmitted, 0.05, td.transmitted <= 0.05);

    Bundle b;
    put(b, cfg, "oracle.csv", csv.str());
    json summary = base_summary(cfg);
    summary["results"] = {{"checks", checks}};
    put_json(b, cfg, "summary.json", summary);
    return b;
}

// ------------------------------------------------------------------ tune, enumerate

Bundle cmd_tune(const RunConfig& cfg, const ExecOptions& opt) {
    const auto spec = network_with_cavity(cfg);
    if (!spec.cavity) throw Error(ErrorKind::config, kModule, "tune needs a cavity section");
    lattice::require_connected(spec);
    const auto recipe = excitation_or(cfg, transport::ExcitationRecipe::at_site(farthest_from(spec, spec.cavity->target_site)));
    auto options = cfg.tune.options;
    options.jobs = opt.jobs;
    const double horizon = cfg.tune.t_final > 0.0 ? cfg.tune.t_final : 80.0 * static_cast<double>(spec.node_count);
    const auto tuned = optimize::tune_cavity(spec, {recipe}, horizon, options);

    CsvTable csv(columns_of("trace.csv"));
    std::vector<double> idx, val;
    auto trace = [&](const char* stage, const optimize::OptimResult& r) {
        for (const auto& t : r.trace) {
            csv.row({stage, cell(t.index), cell(t.params[0]), cell(t.params[1]), cell(t.value)});
            idx.push_back(static_cast<double>(idx.size()));
            val.push_back(t.value);
        }
    };
    trace("grid", tuned.grid);
    trace("refine", tuned.refined);

    auto result_json = [](const optimize::OptimResult& r) {
        return json{{"names", r.names}, {"best", r.best}, {"best_value", r.best_value},
                    {"evaluations", r.evaluations}, {"converged", r.converged}};
    };
    Bundle b;
    put(b, cfg, "trace.csv", csv.str());
    json summary = base_summary(cfg);
    summary["results"] = {{"omega", tuned.omega}, {"M", tuned.mass}, {"K", tuned.spring},
                          {"metric", optimize::to_string(options.metric)}, {"metric_value", tuned.metric_value},
                          {"eta", tuned.eta}, {"trap_duration", tuned.trap_duration}, {"horizon", horizon},
                          {"target", spec.cavity->target_site}, {"grid", result_json(tuned.grid)},
                          {"refined", result_json(tuned.refined)}};
    put_json(b, cfg, "summary.json", summary);
    put(b, cfg, "trace.svg",
        emit_svg({{"objective", idx, val, ""}}, {"Cavity tuning trace", "evaluation", "objective", false, false, {}}));
    return b;
}

Bundle cmd_enumerate(const RunConfig& cfg, const ExecOptions& opt) {
    auto options = cfg.enumerate.options;
    options.tune.jobs = opt.jobs;
    const auto entries = optimize::enumerate_topologies(options);
    CsvTable csv(columns_of("topologies.csv"));
    std::vector<double> rank, eta;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        csv.row({cell(i + 1), e.graph6, e.edge_list, cell(e.n), cell(e.edges), cell(e.target), cell(e.eta),
                 cell(e.spring), cell(e.mass), cell(e.omega)});
        rank.push_back(static_cast<double>(i + 1));
        eta.push_back(e.eta);
    }
    Bundle b;
    put(b, cfg, "topologies.csv", csv.str());
    json summary = base_summary(cfg);
    summary["results"] = {{"ranked", entries.size()},
                          {"connected_graphs", graphs::connected_graphs(options.n, options.min_edges, options.max_edges).size()}};
    put_json(b, cfg, "summary.json", summary);
    if (!entries.empty())
        put(b, cfg, "topologies.svg",
            emit_svg({{"eta by rank", rank, eta, ""}}, {"Topology ranking", "rank", "eta", false, false, {}}));
    return b;
}

json error_json(const std::string& kind, const std::string& module, const std::string& message,
                const std::vector<std::string>& problems, int code) {
    return json{{"error", {{"kind", kind}, {"module", module}, {"message", message}, {"problems", problems}}},
                {"exit_code", code},
                {"version", tool_version}};
}

} // namespace

Bundle execute(const RunConfig& config, const ExecOptions& options) {
    const auto& c = config.command;
    if (c == "simulate") return cmd_simulate(config, options);
    if (c == "dispersion") return cmd_dispersion(config);
    if (c == "scattering") return cmd_scattering(config);
    if (c == "scan") return cmd_scan(config, options);
    if (c == "baseline") return cmd_baseline(config);
    if (c == "scaling") return cmd_scaling(config, options);
    if (c == "oracle-check") return cmd_oracle(config);
    if (c == "tune") return cmd_tune(config, options);
    if (c == "enumerate") return cmd_enumerate(config, options);
    throw Error(ErrorKind::config, kModule, "unknown command '" + c + "'");
}

std::string schema_text() {
    std::string out;
    for (const auto& s : schemas()) {
        out += s.command + " " + s.file + ":";
        for (std::size_t i = 0; i < s.columns.size(); ++i) out += (i ? "," : " ") + s.columns[i];
        out += "\n";
    }
    return out;
}

void write_bundle(const Bundle& bundle, const std::string& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw Error(ErrorKind::io, kModule, "cannot create output directory " + directory);
    for (const auto& [name, content] : bundle.files) {
        const auto path = std::filesystem::path(directory) / name;
        std::ofstream out(path, std::ios::binary);
        out << content;
        if (!out) throw Error(ErrorKind::io, kModule, "cannot write " + path.string());
    }
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Wave-dynamics spatial search on coupled oscillator networks"};
    std::string command, config_path, out_dir;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    bool schema = false, timing = false;
    app.add_option("command", command, "simulate | dispersion | scattering | scan | baseline | scaling | "
                                       "oracle-check | tune | enumerate");
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_dir, "output directory (default: config output_dir)");
    auto* seed_opt = app.add_option("--seed", seed, "64-bit seed, overrides the config");
    app.add_option("--jobs", jobs, "worker threads for scans and grids")->check(CLI::PositiveNumber);
    app.add_flag("--schema", schema, "print CSV column schemas and exit");
    app.add_flag("--timing", timing, "report wall-clock time on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (schema) {
        std::cout << schema_text();
        return 0;
    }

    auto fail = [&](const std::string& kind, const std::string& module, const std::string& message,
                    const std::vector<std::string>& problems, int code) {
        const auto doc = error_json(kind, module, message, problems, code);
        std::cerr << doc.dump() << "\n";
        try {
            Bundle b;
            b.files["error.json"] = doc.dump(2) + "\n";
            write_bundle(b, out_dir.empty() ? "out" : out_dir);
        } catch (...) {
        }
        return code;
    };

    const auto start = std::chrono::steady_clock::now();
    try {
        if (config_path.empty()) throw Error(ErrorKind::config, kModule, "--config is required");
        std::ifstream in(config_path);
        if (!in) throw Error(ErrorKind::config, kModule, "cannot read config file " + config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        auto cfg = parse_config(ss.str(), std::filesystem::path(config_path).parent_path().string());
        if (!command.empty()) {
            const auto& names = command_names();
            if (std::find(names.begin(), names.end(), command) == names.end())
                throw Error(ErrorKind::config, kModule, "unknown command '" + command + "'");
            if (!cfg.command.empty() && cfg.command != command)
                throw Error(ErrorKind::config, kModule,
                            "command '" + command + "' does not match config command '" + cfg.command + "'");
            cfg.command = command;
        }
        if (cfg.command.empty()) throw Error(ErrorKind::config, kModule, "no command given");
        if (*seed_opt) cfg.seed = seed;
        if (out_dir.empty()) out_dir = cfg.output_dir;
        const auto bundle = execute(cfg, {jobs});
        write_bundle(bundle, out_dir);
    } catch (const ValidationError& e) {
        return fail(to_string(e.kind()), e.module(), e.what(), e.problems(), 2);
    } catch (const Error& e) {
        return fail(to_string(e.kind()), e.module(), e.what(), {}, e.is_input_error() ? 2 : 1);
    } catch (const std::exception& e) {
        return fail("internal", kModule, e.what(), {}, 1);
    }
    if (timing) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cerr << "wall-clock " << secs << " s\n";
    }
    return 0;
}

} // namespace wavesearch::cli
