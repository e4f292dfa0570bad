#include "wavesearch/dynamics.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "wavesearch/error.hpp"

namespace wavesearch::dynamics {

namespace {

const char* const kModule = "dynamics";

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void check_state(const StiffnessSystem& system, const State& state) {
    if (state.x.size() != system.dimension || state.p.size() != system.dimension)
        throw Error(ErrorKind::validation, kModule, "state dimension does not match the system");
}

// out = -K x
void forces(const StiffnessSystem& system, std::span<const double> x, std::span<double> out) {
    system.sparse.apply(x, out);
    for (double& f : out) f = -f;
}

} // namespace

bool State::finite() const noexcept {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    for (double v : p)
        if (!std::isfinite(v)) return false;
    return std::isfinite(time);
}

std::vector<double> EnergyLedger::site_energy() const {
    std::vector<double> e(kinetic.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = kinetic[i] + site_potential[i];
    return e;
}

State zero_state(const StiffnessSystem& system) {
    State s;
    s.x.assign(system.dimension, 0.0);
    s.p.assign(system.dimension, 0.0);
    return s;
}

Excitation init_pulse(const StiffnessSystem& system, const ModeBasis& modes,
                      const PulseParams& pulse) {
    const std::size_t n = system.node_count;
    if (pulse.direction != 0 && system.topology == lattice::Topology::graph)
        throw Error(ErrorKind::validation, kModule,
                    "directed pulse needs a chain or ring topology");
    if (pulse.direction < -1 || pulse.direction > 1)
        throw Error(ErrorKind::validation, kModule, "pulse direction must be -1, 0 or +1");
    if (!(pulse.q0 > 0.0 && pulse.q0 < std::numbers::pi))
        throw Error(ErrorKind::range, kModule, "pulse q0 must lie in (0, pi)");
    if (!(pulse.width >= 1.0)) throw Error(ErrorKind::range, kModule, "pulse width must be >= 1");
    if (!(pulse.amplitude >= 0.0) || !std::isfinite(pulse.amplitude))
        throw Error(ErrorKind::validation, kModule, "pulse amplitude must be finite and >= 0");
    if (!(pulse.center >= 0.0 && pulse.center <= static_cast<double>(n - 1)))
        throw Error(ErrorKind::range, kModule, "pulse center must lie on the network");

    Excitation out;
    if (pulse.width >= static_cast<double>(n) / 4.0)
        out.warnings.push_back("pulse width " + fmt(pulse.width) + " >= n/4 = " +
                               fmt(static_cast<double>(n) / 4.0) +
                               ": packet wraps, band purity degraded");

    const std::size_t d = system.dimension;
    std::vector<double> im(d, 0.0);
    out.state = zero_state(system);
    const bool ring = system.topology == lattice::Topology::ring;
    for (std::size_t i = 0; i < n; ++i) {
        double dn = static_cast<double>(i) - pulse.center;
        if (ring) dn -= static_cast<double>(n) * std::round(dn / static_cast<double>(n));
        const double g = pulse.amplitude * std::exp(-dn * dn / (4.0 * pulse.width * pulse.width));
        out.state.x[i] = g * std::cos(pulse.q0 * dn);
        im[i] = g * std::sin(pulse.q0 * dn);
    }

    if (pulse.direction != 0) {
        // p = dir * M * Omega y with Omega y = sum_a w_a v_a (v_a^T M y)
        for (std::size_t a = 0; a < d; ++a) {
            double proj = 0.0;
            for (std::size_t i = 0; i < d; ++i) proj += modes.vectors(i, a) * system.mass[i] * im[i];
            const double c = modes.frequencies[a] * proj;
            for (std::size_t i = 0; i < d; ++i) out.state.p[i] += c * modes.vectors(i, a);
        }
        for (std::size_t i = 0; i < d; ++i)
            out.state.p[i] *= pulse.direction * system.mass[i];
    }
    out.energy = hamiltonian(system, out.state);
    return out;
}

Excitation init_site_excitation(const StiffnessSystem& system, std::size_t site, double energy) {
    if (site >= system.dimension) throw Error(ErrorKind::range, kModule, "excitation site out of range");
    if (system.cavity_index && site == *system.cavity_index)
        throw Error(ErrorKind::validation, kModule, "the cavity cannot be the excitation site");
    if (!(energy > 0.0) || !std::isfinite(energy))
        throw Error(ErrorKind::validation, kModule, "excitation energy must be positive");
    Excitation out;
    out.state = zero_state(system);
    out.state.p[site] = std::sqrt(2.0 * system.mass[site] * energy);
    out.energy = energy;
    return out;
}

State step_verlet(const StiffnessSystem& system, const State& state, double dt, double gamma) {
    check_state(system, state);
    if (dt < 0.0 || !std::isfinite(dt)) throw Error(ErrorKind::validation, kModule, "dt must be >= 0");
    if (gamma < 0.0) throw Error(ErrorKind::validation, kModule, "gamma must be >= 0");
    if (dt == 0.0) return state;

    const std::size_t d = system.dimension;
    const double decay = std::exp(-0.5 * gamma * dt);
    const double h = 0.5 * dt;
    State s = state;
    std::vector<double> f(d);
    forces(system, s.x, f);
    for (std::size_t i = 0; i < d; ++i) s.p[i] = s.p[i] * decay + h * f[i];
    for (std::size_t i = 0; i < d; ++i) s.x[i] += dt * s.p[i] / system.mass[i];
    forces(system, s.x, f);
    for (std::size_t i = 0; i < d; ++i) s.p[i] = (s.p[i] + h * f[i]) * decay;
    s.time = state.time + dt;
    return s;
}

State evolve_exact(const StiffnessSystem& system, const ModeBasis& modes, const State& state0,
                   double t, double gamma) {
    if (gamma != 0.0)
        throw Error(ErrorKind::validation, kModule,
                    "exact propagation supports undamped motion only (gamma = 0)");
    check_state(system, state0);
    return ModalPropagator(system, modes, state0).at(state0.time + t);
}

EnergyLedger energy_ledger(const StiffnessSystem& system, const State& state) {
    check_state(system, state);
    const std::size_t d = system.dimension;
    EnergyLedger led;
    led.time = state.time;
    led.kinetic.resize(d);
    led.site_potential.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        led.kinetic[i] = 0.5 * state.p[i] * state.p[i] / system.mass[i];
        led.site_potential[i] = 0.5 * system.onsite[i] * state.x[i] * state.x[i];
    }
    for (const auto& sp : system.springs) {
        const double dx = state.x[sp.i] - state.x[sp.j];
        const double half = 0.25 * sp.k * dx * dx;
        led.site_potential[sp.i] += half;
        led.site_potential[sp.j] += half;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < d; ++i) total += led.kinetic[i];
    for (std::size_t i = 0; i < d; ++i) total += led.site_potential[i];
    led.total = total;
    if (system.cavity_index)
        led.cavity_energy = led.kinetic[*system.cavity_index] + led.site_potential[*system.cavity_index];
    return led;
}

double hamiltonian(const StiffnessSystem& system, const State& state) {
    check_state(system, state);
    double kin = 0.0;
    for (std::size_t i = 0; i < system.dimension; ++i)
        kin += 0.5 * state.p[i] * state.p[i] / system.mass[i];
    const auto kx = multiply(system.stiffness, state.x);
    return kin + 0.5 * dot(state.x, kx);
}

double verlet_shadow_energy(const StiffnessSystem& system, const State& state, double dt) {
    const auto kx = multiply(system.stiffness, state.x);
    double correction = 0.0;
    for (std::size_t i = 0; i < system.dimension; ++i) correction += kx[i] * kx[i] / system.mass[i];
    return hamiltonian(system, state) - 0.125 * dt * dt * correction;
}

double stability_limit(const ModeBasis& modes) {
    const double wmax = modes.max_frequency();
    return wmax > 0.0 ? 0.1 / wmax : std::numeric_limits<double>::infinity();
}

Trajectory run(const StiffnessSystem& system, const ModeBasis& modes, const State& state0,
               const RunOptions& options) {
    check_state(system, state0);
    if (!(options.dt > 0.0) || !std::isfinite(options.dt))
        throw Error(ErrorKind::validation, kModule, "dt must be positive");
    if (!(options.t_final >= 0.0) || !std::isfinite(options.t_final))
        throw Error(ErrorKind::validation, kModule, "t_final must be >= 0");
    if (!(options.gamma >= 0.0)) throw Error(ErrorKind::validation, kModule, "gamma must be >= 0");
    if (options.record_stride == 0)
        throw Error(ErrorKind::validation, kModule, "record_stride must be >= 1");
    const double limit = stability_limit(modes);
    if (options.dt > limit * (1.0 + 1e-12))
        throw Error(ErrorKind::guard, kModule,
                    "dt = " + fmt(options.dt) + " violates the stability guard dt <= 0.1/omega_max = " +
                        fmt(limit) + " (omega_max = " + fmt(modes.max_frequency()) + ")");

    Trajectory traj;
    traj.dt = options.dt;
    traj.gamma = options.gamma;
    traj.record_stride = options.record_stride;
    traj.steps = static_cast<std::size_t>(std::llround(options.t_final / options.dt));
    const double realised = static_cast<double>(traj.steps) * options.dt;
    if (std::abs(realised - options.t_final) > 1e-9 * std::max(1.0, options.t_final))
        traj.warnings.push_back("t_final " + fmt(options.t_final) + " rounded to " +
                                std::to_string(traj.steps) + " steps (t = " + fmt(realised) + ")");

    const std::size_t d = system.dimension;
    const double dt = options.dt;
    const double h = 0.5 * dt;
    const double decay = std::exp(-0.5 * options.gamma * dt);
    std::vector<double> inv_m(d);
    for (std::size_t i = 0; i < d; ++i) inv_m[i] = 1.0 / system.mass[i];

    State s = state0;
    const double t0 = state0.time;
    auto record = [&](std::size_t step) {
        s.time = t0 + static_cast<double>(step) * dt;
        if (!s.finite())
            throw Error(ErrorKind::numerical, kModule,
                        "non-finite state at t = " + fmt(s.time));
        traj.ledgers.push_back(energy_ledger(system, s));
        if (options.keep_states) traj.states.push_back(s);
    };

    std::vector<double> f(d);
    forces(system, s.x, f);
    record(0);
    for (std::size_t step = 1; step <= traj.steps; ++step) {
        for (std::size_t i = 0; i < d; ++i) s.p[i] = s.p[i] * decay + h * f[i];
        for (std::size_t i = 0; i < d; ++i) s.x[i] += dt * s.p[i] * inv_m[i];
        forces(system, s.x, f);
        for (std::size_t i = 0; i < d; ++i) s.p[i] = (s.p[i] + h * f[i]) * decay;
        if (step % options.record_stride == 0) record(step);
    }
    s.time = t0 + static_cast<double>(traj.steps) * dt;
    if (!s.finite()) throw Error(ErrorKind::numerical, kModule, "non-finite final state");
    traj.final_state = std::move(s);
    return traj;
}

Trajectory run(const StiffnessSystem& system, const State& state0, const RunOptions& options) {
    return run(system, modes::normal_modes(system), state0, options);
}

ModalPropagator::ModalPropagator(const StiffnessSystem& system, const ModeBasis& modes,
                                 const State& state0)
    : modes_(&modes), mass_(system.mass), t0_(state0.time) {
    check_state(system, state0);
    const std::size_t d = system.dimension;
    if (modes.dimension() != d)
        throw Error(ErrorKind::validation, kModule, "mode basis does not match the system");
    a_.assign(d, 0.0);
    b_.assign(d, 0.0);
    for (std::size_t a = 0; a < d; ++a) {
        double xa = 0.0, pa = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            xa += modes.vectors(i, a) * mass_[i] * state0.x[i];
            pa += modes.vectors(i, a) * state0.p[i];
        }
        a_[a] = xa;
        b_[a] = pa;
    }
}

State ModalPropagator::at(double t) const {
    const std::size_t d = a_.size();
    const double tau = t - t0_;
    std::vector<double> q(d), qd(d);
    for (std::size_t a = 0; a < d; ++a) {
        const double w = modes_->frequencies[a];
        if (w == 0.0) {
            q[a] = a_[a] + b_[a] * tau;
            qd[a] = b_[a];
        } else {
            const double c = std::cos(w * tau), s = std::sin(w * tau);
            q[a] = a_[a] * c + b_[a] / w * s;
            qd[a] = -a_[a] * w * s + b_[a] * c;
        }
    }
    State out;
    out.time = t;
    out.x.assign(d, 0.0);
    out.p.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        double x = 0.0, v = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            x += modes_->vectors(i, a) * q[a];
            v += modes_->vectors(i, a) * qd[a];
        }
        out.x[i] = x;
        out.p[i] = mass_[i] * v;
    }
    return out;
}

std::vector<double> ModalPropagator::cavity_energy_series(const StiffnessSystem& system, double dt,
                                                          std::size_t count) const {
    if (!system.cavity_index)
        throw Error(ErrorKind::validation, kModule, "system has no cavity");
    const std::size_t c = *system.cavity_index;
    const std::size_t t = *system.target_site;
    const std::size_t d = a_.size();
    const double kc = system.springs.back().k;
    const double onsite_c = system.onsite[c];
    const double m_c = system.mass[c];

    // Mode a contributes Re(amp_a z_a(tau)) with z_a = e^{i w_a tau}; zero modes are linear.
    using cd = std::complex<double>;
    std::vector<cd> amp(d), z(d), rot(d);
    std::vector<double> vc(d), vt(d), w(d);
    for (std::size_t a = 0; a < d; ++a) {
        w[a] = modes_->frequencies[a];
        vc[a] = modes_->vectors(c, a);
        vt[a] = modes_->vectors(t, a);
        amp[a] = w[a] == 0.0 ? cd(0.0) : cd(a_[a], -b_[a] / w[a]);
        rot[a] = std::polar(1.0, w[a] * dt);
    }

    constexpr std::size_t kAnchor = 256;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double tau = static_cast<double>(i) * dt;
        if (i % kAnchor == 0) {
            for (std::size_t a = 0; a < d; ++a) z[a] = std::polar(1.0, w[a] * tau);
        }
        double xc = 0.0, xt = 0.0, vcav = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            double q, qd;
            if (w[a] == 0.0) {
                q = a_[a] + b_[a] * tau;
                qd = b_[a];
            } else {
                const cd u = amp[a] * z[a];
                q = u.real();
                qd = -w[a] * u.imag();
            }
            xc += vc[a] * q;
            xt += vt[a] * q;
            vcav += vc[a] * qd;
        }
        const double dx = xt - xc;
        out[i] = 0.5 * m_c * vcav * vcav + 0.5 * onsite_c * xc * xc + 0.25 * kc * dx * dx;
        for (std::size_t a = 0; a < d; ++a) z[a] *= rot[a];
    }
    return out;
}

double fs_per_time_unit(double k, double m) {
    if (!(k > 0.0) || !(m > 0.0)) throw Error(ErrorKind::validation, kModule, "k and m must be positive");
    return 50.0 * std::sqrt(k / m);
}

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

} // namespace wavesearch::dynamics
