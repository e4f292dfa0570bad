// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "wavesearch/cli/commands.hpp"
#include "wavesearch/cli/config.hpp"
#include "wavesearch/dynamics.hpp"
#include "wavesearch/error.hpp"
#include "wavesearch/optimize.hpp"
#include "wavesearch/transport.hpp"

using namespace wavesearch;
using lattice::Boundary;

namespace tol {
constexpr double verlet_drift = 1e-5;
constexpr double exact_drift = 1e-10;
constexpr double energy_seconds = 5.0;
constexpr double dispersion = 1e-10;
constexpr double images_rms = 1e-9;
constexpr double wall_overlap = -0.99;
constexpr double free_overlap = 0.99;
constexpr double reflection_seconds = 10.0;
constexpr double flux = 1e-9;
constexpr double blocked_s2 = 1e-6;
constexpr double blocked_transmission = 0.05;
constexpr double peak_match = 0.02;  // fraction of band width
constexpr double scan_seconds = 120.0;
constexpr double wave_exponent = 1.0;
constexpr double hop_exponent = 0.5;
constexpr double exponent_band = 0.1;
constexpr double floor_factor = 5.0;
constexpr double non_collapse = 0.5;
constexpr double fmo_contrast = 3.0;
constexpr double perf_seconds = 3.0;
} // namespace tol

namespace {

int failures = 0;

void verdict(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d %-28s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void info(const std::string& text) {
    std::printf("       %s\n", text.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

void guarded(int id, const char* name, auto&& body) {
    try {
        body();
    } catch (const std::exception& e) {
        verdict(id, name, false, std::string("error: ") + e.what());
    }
}

// ------------------------------------------------------------------ 1

void energy_conservation() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto sys = lattice::assemble(lattice::attach_cavity(lattice::fmo_preset(), 2, 1.0, 1.0));
    const auto basis = modes::normal_modes(sys);
    const double dt = 0.05 / basis.max_frequency();
    const std::size_t steps = 100000;
    const auto s0 = dynamics::init_site_excitation(sys, lattice::fmo_pigment(1), 1.0).state;
    const double e0 = dynamics::hamiltonian(sys, s0);
    const double shadow0 = dynamics::verlet_shadow_energy(sys, s0, dt);

    auto s = s0;
    double worst = 0.0, worst_exact = 0.0, worst_shadow = 0.0;
    for (std::size_t i = 1; i <= steps; ++i) {
        s = dynamics::step_verlet(sys, s, dt);
        if (i % 100 == 0) {
            worst = std::max(worst, std::abs(dynamics::hamiltonian(sys, s) - e0) / e0);
            worst_shadow = std::max(worst_shadow, std::abs(dynamics::verlet_shadow_energy(sys, s, dt) - shadow0) / shadow0);
        }
        if (i % 1000 == 0) {
            const auto ex = dynamics::evolve_exact(sys, basis, s0, static_cast<double>(i) * dt);
            worst_exact = std::max(worst_exact, std::abs(dynamics::hamiltonian(sys, ex) - e0) / e0);
        }
    }
    const double secular = std::abs(dynamics::hamiltonian(sys, s) - e0) / e0;
    const double secs = seconds_since(t0);
    verdict(1, "energy conservation",
            worst <= tol::verlet_drift && worst_exact <= tol::exact_drift && secs < tol::energy_seconds,
            fmt("verlet max |dE|/E0 = %.3e (<= %.0e), exact = %.3e (<= %.0e), %.2f s (< %.0f s)", worst,
                tol::verlet_drift, worst_exact, tol::exact_drift, secs, tol::energy_seconds));
    info(fmt("end-point |dE|/E0 = %.3e, shadow-energy max deviation = %.3e, dt = %.5f", secular, worst_shadow, dt));
}

// ------------------------------------------------------------------ 2

void dispersion_relation() {
    const auto basis = modes::normal_modes(lattice::assemble(lattice::build_ring(64, 1.0, 1.0, 0.0)));
    std::vector<double> ref;
    for (int j = 0; j < 64; ++j) ref.push_back(2.0 * std::abs(std::sin(std::numbers::pi * j / 64.0)));
    std::sort(ref.begin(), ref.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(basis.frequencies[i] - ref[i]));
    verdict(2, "dispersion relation", worst <= tol::dispersion,
            fmt("ring(64) max |omega - 2 sin(pi j/64)| = %.3e (<= %.0e)", worst, tol::dispersion));
}

// ------------------------------------------------------------------ 3

void reflection_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const double q0 = std::numbers::pi / 2;
    const auto wall = lattice::build_chain(128, 1.0, 1.0, 0.0, Boundary::fixed_left);
    const dynamics::PulseParams img{36, 6, q0, 1.0, -1};
    const auto setup = transport::images_setup(wall, img);
    const auto sys = lattice::assemble(wall);
    const auto basis = modes::normal_modes(sys);
    const auto direct0 = transport::images_restrict(setup, setup.state0);
    const double t_end = 2.0 * (img.center + 1.0) / modes::group_velocity(1, 1, q0);
    double rms = 0.0;
    for (int i = 0; i <= 16; ++i) {
        const double t = t_end * i / 16.0;
        const auto ref = transport::images_restrict(setup, transport::images_doubled_state(setup, t));
        const auto dir = dynamics::evolve_exact(sys, basis, direct0, t);
        double sq = 0.0;
        for (std::size_t j = 0; j < ref.x.size(); ++j) sq += (ref.x[j] - dir.x[j]) * (ref.x[j] - dir.x[j]);
        rms = std::max(rms, std::sqrt(sq / static_cast<double>(ref.x.size())));
    }
    const dynamics::PulseParams narrow{32, 8, q0, 1.0, -1};
    const auto fw = transport::reflection_fidelity(wall, narrow);
    const auto ff = transport::reflection_fidelity(lattice::build_chain(128, 1.0, 1.0, 0.0, Boundary::free), narrow);
    const double secs = seconds_since(t0);
    verdict(3, "reflection oracle",
            rms <= tol::images_rms && fw.overlap <= tol::wall_overlap && ff.overlap >= tol::free_overlap &&
                secs < tol::reflection_seconds,
            fmt("images RMS = %.2e (<= %.0e), wall overlap = %.5f (<= %.2f), free end = %.5f (>= %.2f), %.2f s",
                rms, tol::images_rms, fw.overlap, tol::wall_overlap, ff.overlap, tol::free_overlap, secs));
    const auto broad = transport::reflection_fidelity(wall, {32, 1, q0, 1.0, -1});
    info(fmt("broadband w=1 packet overlap = %.5f (distortion %.3f)", broad.overlap, broad.distortion));
}

// ------------------------------------------------------------------ 4

void beam_splitter() {
    dynamics::SplitMix64 rng(2024);
    double flux = 0.0, blocked = 0.0;
    for (int d = 0; d < 10; ++d) {
        const double K = 0.1 + 4.9 * rng.uniform(), M = 0.1 + 4.9 * rng.uniform();
        for (int i = 0; i < 100; ++i) {
            const double w = 2.0 * (i + 0.5) / 100.0;
            flux = std::max(flux, modes::side_branch_scattering(1, 1, K, M, w).flux_error());
        }
        const double wc = std::sqrt(K / M);
        if (wc < 2.0) blocked = std::max(blocked, std::norm(modes::side_branch_scattering(1, 1, K, M, wc).s));
    }
    const auto td = transport::time_domain_transmission(1.0, 1.0, {});
    verdict(4, "beam splitter",
            flux <= tol::flux && blocked <= tol::blocked_s2 && td.transmitted <= tol::blocked_transmission,
            fmt("max flux error = %.2e (<= %.0e), |s|^2 at Omega = %.2e (<= %.0e), time-domain T = %.4f (<= %.2f)",
                flux, tol::flux, blocked, tol::blocked_s2, td.transmitted, tol::blocked_transmission));
    info(fmt("time-domain reflected share = %.4f at Omega = %.4f", td.reflected, td.omega));
}

// ------------------------------------------------------------------ 5

void resonance_condition() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = 16;
    transport::ScanOptions o;
    o.jobs = workers();
    const auto grid = transport::wavenumber_grid(64, 1.0, 1.0);
    const auto scan = transport::resonance_scan(lattice::build_ring(n, 1.0, 1.0, 0.0), grid,
                                                transport::ExcitationRecipe::at_site(n / 2), o);
    const auto roots = modes::resonance_frequencies(n, 1, 1, o.cavity_mass, o.cavity_mass);
    const double window = tol::peak_match * 2.0;
    auto near = [&](double a, const auto& list, auto get) {
        return std::any_of(list.begin(), list.end(), [&](const auto& v) { return std::abs(get(v) - a) <= window; });
    };
    std::size_t unmatched_peaks = 0, unmatched_roots = 0;
    for (const auto& p : scan.peaks)
        if (!near(p.omega, roots, [](double r) { return r; })) ++unmatched_peaks;
    for (double r : roots)
        if (r >= grid.front() && r <= grid.back() && !near(r, scan.peaks, [](const auto& p) { return p.omega; }))
            ++unmatched_roots;
    const double secs = seconds_since(t0);
    verdict(5, "resonance condition", unmatched_peaks == 0 && unmatched_roots == 0 && secs < tol::scan_seconds,
            fmt("ring(16): %zu peaks, %zu roots, unmatched peaks %zu, unmatched roots %zu (window %.3f), %.1f s",
                scan.peaks.size(), roots.size(), unmatched_peaks, unmatched_roots, window, secs));

    // Strong-coupling variant, informational.
    transport::ScanOptions strong = o;
    strong.cavity_mass = 1.0;
    strong.t_final = 400;
    const auto s2 = transport::resonance_scan(lattice::build_ring(n, 1.0, 1.0, 0.0), grid,
                                              transport::ExcitationRecipe::at_site(n / 2), strong);
    const auto r2 = modes::resonance_frequencies(n, 1, 1, 1.0, 1.0);
    std::size_t miss = 0;
    for (const auto& p : s2.peaks)
        if (!near(p.omega, r2, [](double r) { return r; })) ++miss;
    info(fmt("K = M = 1 variant: %zu peaks, %zu roots, %zu peaks without a root", s2.peaks.size(), r2.size(), miss));
}

// ------------------------------------------------------------------ 6

void ballistic_vs_diffusive() {
    const std::size_t n = 256;
    const double origin = n / 2;
    const auto chain = lattice::build_chain(n, 1.0, 1.0, 0.0, Boundary::free);
    const auto sys = lattice::assemble(chain);
    const auto basis = modes::normal_modes(sys);
    const auto s0 = dynamics::init_site_excitation(sys, n / 2, 1.0).state;
    const double a_wave = transport::spreading_exponent(
        transport::wave_width_curve(sys, basis, s0, transport::log_times(2, 100, 24), origin));
    std::vector<double> occ(n, 0.0);
    occ[n / 2] = 1.0;
    const auto hop = transport::make_hopping(chain, 1.0, occ);
    const auto res = transport::hopping_baseline(hop, 300, transport::hopping_stability_limit(hop), 20, true);
    const double a_hop = transport::spreading_exponent(
        transport::hopping_width_curve(res, transport::log_times(1, 300, 24), origin));
    verdict(6, "ballistic vs diffusive",
            std::abs(a_wave - tol::wave_exponent) <= tol::exponent_band &&
                std::abs(a_hop - tol::hop_exponent) <= tol::exponent_band,
            fmt("wave exponent = %.4f (1.0 +- 0.1), hopping exponent = %.4f (0.5 +- 0.1)", a_wave, a_hop));
}

// ------------------------------------------------------------------ 7

void accumulation_gate() {
    const auto t0 = std::chrono::steady_clock::now();
    transport::ScalingOptions o;
    o.jobs = workers();
    const std::vector<std::size_t> sizes{8, 16, 32};
    const auto study = transport::scaling_study(sizes, o);
    std::string etas;
    for (const auto& r : study.rows) etas += fmt("N=%zu: %.4f (floor %.4f)  ", r.n, r.eta_tuned, tol::floor_factor / r.n);
    verdict(7, "O(1) accumulation", study.floor_ok && study.collapse_ok,
            etas + fmt("ratio(32/8) = %.4f (>= %.1f)", study.ratio, tol::non_collapse));
    for (const auto& r : study.rows)
        info(fmt("N=%zu Omega=%.4f M=%.4f detuned eta=%.4f uncoupled eta=%.2e", r.n, r.omega, r.cavity_mass,
                 r.eta_detuned, r.eta_uncoupled));
    if (!study.falsification.empty()) info("falsification report emitted");
    info(fmt("%.1f s", seconds_since(t0)));
}

// ------------------------------------------------------------------ 8

void fmo_fidelity() {
    const auto f = lattice::fmo_preset();
    std::vector<lattice::Edge> expected;
    for (auto [a, b] : {std::pair{6, 5}, {5, 7}, {7, 4}, {4, 3}, {1, 2}, {2, 7}, {7, 3}}) {
        std::size_t i = lattice::fmo_pigment(a), j = lattice::fmo_pigment(b);
        expected.push_back({std::min(i, j), std::max(i, j), 1.0});
    }
    auto have = f.edges;
    std::sort(have.begin(), have.end(), [](auto& x, auto& y) { return std::pair{x.i, x.j} < std::pair{y.i, y.j}; });
    std::sort(expected.begin(), expected.end(),
              [](auto& x, auto& y) { return std::pair{x.i, x.j} < std::pair{y.i, y.j}; });
    const bool topology = have == expected && f.node_count == 7;

    const auto target = lattice::fmo_pigment(lattice::fmo_reaction_centre_pigment);
    const auto spec = lattice::attach_cavity(f, target, 1.0, 1.0);
    const double horizon = 80.0 * 7;
    const double band = 2.0 * optimize::reference_frequency(f);
    optimize::TuneOptions o;
    o.jobs = workers();
    bool ok = topology;
    std::string detail = topology ? "topology exact; " : "topology MISMATCH; ";
    for (int pigment : {1, 6}) {
        const auto exc = transport::ExcitationRecipe::at_site(lattice::fmo_pigment(pigment));
        const auto tuned = optimize::tune_cavity(spec, {exc}, horizon, o);
        const double w_off = tuned.omega * 1.3 < band ? tuned.omega * 1.3 : tuned.omega * 0.7;
        const auto off = optimize::cavity_capture(spec, exc, tuned.mass * w_off * w_off, tuned.mass, horizon);
        const double contrast = tuned.eta / std::max(off.eta, 1e-300);
        ok = ok && contrast >= tol::fmo_contrast;
        detail += fmt("pigment %d: eta %.4f vs detuned %.4f, contrast %.2f (>= %.0f); ", pigment, tuned.eta, off.eta,
                      contrast, tol::fmo_contrast);
        info(fmt("pigment %d tuned Omega=%.4f M=%.4f K=%.4f", pigment, tuned.omega, tuned.mass, tuned.spring));
        if (pigment == 1) {
            // Neighbour-site share with the cavity decoupled.
            const auto plain = optimize::cavity_capture(spec, exc, 0.0, tuned.mass, horizon);
            auto sys = lattice::assemble(f);
            const auto basis = modes::normal_modes(sys);
            const auto s0 = dynamics::init_site_excitation(sys, exc.site, 1.0).state;
            double best_share = 0.0;
            for (double t = 0; t <= horizon; t += 0.25) {
                const auto led = dynamics::energy_ledger(sys, dynamics::evolve_exact(sys, basis, s0, t)).site_energy();
                best_share = std::max(best_share, led[target]);
            }
            info(fmt("decoupled: cavity eta %.2e, peak share at pigment 3 = %.4f; tuned/3x share = %.4f/%.4f",
                     plain.eta, best_share, tuned.eta, 3 * best_share));
        }
    }
    verdict(8, "FMO preset fidelity", ok, detail);
}

// ------------------------------------------------------------------ 9

void determinism() {
    const std::vector<std::string> configs{
        R"({"command": "simulate", "seed": 5, "network": {"preset": "fmo"}, "cavity": {"site": 2, "mass": 1, "spring": 0.5},
            "excitation": {"kind": "site", "site": 0}, "simulate": {"t_final": 50, "record_stride": 10, "calibrate_fs": true}})",
        R"({"command": "simulate", "seed": 5, "network": {"preset": "chain", "n": 32},
            "excitation": {"kind": "pulse", "center": 10, "width": 3}, "simulate": {"t_final": 20, "integrator": "exact"}})",
        R"({"command": "dispersion", "seed": 5})",
        R"({"command": "scattering", "seed": 5, "scattering": {"K": 2, "M": 1}})",
        R"({"command": "scan", "seed": 5, "scan": {"points": 16, "t_final": 500}})",
        R"({"command": "baseline", "seed": 5, "network": {"preset": "fmo"}, "baseline": {"sink_site": 2}})",
        R"({"command": "scaling", "seed": 5, "scaling": {"sizes": [8, 10], "grid": 8, "refine_evals": 20}})",
        R"({"command": "oracle-check", "seed": 5})",
        R"({"command": "tune", "seed": 5, "network": {"preset": "fmo"}, "cavity": {"site": 2, "tune": true},
            "excitation": {"kind": "site", "site": 0}, "tune": {"grid": 8, "refine_evals": 30}})",
        R"({"command": "enumerate", "seed": 5, "enumerate": {"n": 4, "top": 5, "grid": 6, "refine_evals": 10}})",
    };
    std::size_t files = 0, mismatched = 0;
    std::string bad;
    for (const auto& text : configs) {
        const auto cfg = cli::parse_config(text);
        const auto a = cli::execute(cfg, {1});
        const auto b = cli::execute(cfg, {workers()});
        for (const auto& [name, content] : a.files) {
            if (name.ends_with(".svg")) continue;
            ++files;
            const auto it = b.files.find(name);
            if (it == b.files.end() || it->second != content) {
                ++mismatched;
                bad += " " + cfg.command + "/" + name;
            }
        }
        if (a.files.size() != b.files.size()) ++mismatched;
    }
    verdict(9, "determinism", mismatched == 0,
            fmt("%zu CSV/JSON files across %zu runs, %zu differ", files, configs.size(), mismatched) + bad);
}

// ------------------------------------------------------------------ 10

void performance() {
    const auto sys = lattice::assemble(lattice::build_chain(64, 1.0, 1.0, 0.0, Boundary::free));
    const auto basis = modes::normal_modes(sys);
    const double dt = 0.05 / basis.max_frequency();
    const auto s0 = dynamics::init_site_excitation(sys, 0, 1.0).state;
    const std::size_t steps = 1000000;
    const auto t0 = std::chrono::steady_clock::now();
    const auto traj = dynamics::run(sys, basis, s0, {dt, dt * steps, 0.0, steps, false});
    const double secs = seconds_since(t0);
    verdict(10, "performance", secs <= tol::perf_seconds && traj.steps == steps,
            fmt("chain(64), %zu Verlet steps in %.3f s (<= %.0f s)", traj.steps, secs, tol::perf_seconds));
}

} // namespace

int main() {
    guarded(1, "energy conservation", energy_conservation);
    guarded(2, "dispersion relation", dispersion_relation);
    guarded(3, "reflection oracle", reflection_oracle);
    guarded(4, "beam splitter", beam_splitter);
    guarded(5, "resonance condition", resonance_condition);
    guarded(6, "ballistic vs diffusive", ballistic_vs_diffusive);
    guarded(7, "O(1) accumulation", accumulation_gate);
    guarded(8, "FMO preset fidelity", fmo_fidelity);
    guarded(9, "determinism", determinism);
    guarded(10, "performance", performance);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
