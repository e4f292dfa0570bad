#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wavesearch/lattice.hpp"
#include "wavesearch/modes.hpp"

namespace wavesearch::dynamics {

using lattice::StiffnessSystem;
using modes::ModeBasis;

struct State {
    std::vector<double> x;  // displacements
    std::vector<double> p;  // momenta
    double time = 0.0;

    bool finite() const noexcept;
};

struct EnergyLedger {
    std::vector<double> kinetic;
    std::vector<double> site_potential;
    double cavity_energy = 0.0;
    double total = 0.0;
    double time = 0.0;

    /// kinetic + site_potential per degree of freedom
    std::vector<double> site_energy() const;
};

struct Trajectory {
    double dt = 0.0;
    std::size_t record_stride = 1;
    std::size_t steps = 0;
    double gamma = 0.0;
    std::vector<EnergyLedger> ledgers;
    std::vector<State> states;  // filled only when requested
    State final_state;
    std::vector<std::string> warnings;
};

struct PulseParams {
    double center = 0.0;
    double width = 4.0;
    double q0 = 1.5707963267948966;
    double amplitude = 1.0;
    int direction = 1;  // +1 / -1 directed, 0 standing (allowed on any graph)
};

struct Excitation {
    State state;
    double energy = 0.0;
    std::vector<std::string> warnings;
};

/// Gaussian packet x_n = A exp(-(n-c)^2 / 4w^2) cos(q0 (n-c)); momenta keep one
/// group-velocity branch. Ring distances are wrapped.
Excitation init_pulse(const StiffnessSystem& system, const ModeBasis& modes,
                      const PulseParams& pulse);

/// Impulsive kick: zero displacement, p_site = sqrt(2 m E).
Excitation init_site_excitation(const StiffnessSystem& system, std::size_t site, double energy);

State zero_state(const StiffnessSystem& system);

/// One velocity-Verlet step with exp(-gamma dt/2) momentum decay on each side.
State step_verlet(const StiffnessSystem& system, const State& state, double dt, double gamma = 0.0);

/// Exact undamped propagation through the normal modes.
State evolve_exact(const StiffnessSystem& system, const ModeBasis& modes, const State& state0,
                   double t, double gamma = 0.0);

EnergyLedger energy_ledger(const StiffnessSystem& system, const State& state);

/// 1/2 p^T M^-1 p + 1/2 x^T K x straight from the quadratic form.
double hamiltonian(const StiffnessSystem& system, const State& state);

/// Quadratic invariant that velocity Verlet conserves exactly for linear forces:
/// 1/2 p^T M^-1 p + 1/2 x^T (K - dt^2/4 K M^-1 K) x.
double verlet_shadow_energy(const StiffnessSystem& system, const State& state, double dt);

struct RunOptions {
    double dt = 0.01;
    double t_final = 1.0;
    double gamma = 0.0;
    std::size_t record_stride = 1;
    bool keep_states = false;
};

/// Largest dt accepted by run(): 0.1 / omega_max.
double stability_limit(const ModeBasis& modes);

Trajectory run(const StiffnessSystem& system, const ModeBasis& modes, const State& state0,
               const RunOptions& options);
Trajectory run(const StiffnessSystem& system, const State& state0, const RunOptions& options);

/// Modal coordinates of one initial state; evaluates any later time exactly.
class ModalPropagator {
public:
    ModalPropagator(const StiffnessSystem& system, const ModeBasis& modes, const State& state0);

    State at(double t) const;

    /// Ledger cavity_energy sampled at t0 + i*dt for i < count. Only the target and
    /// cavity coordinates are reconstructed, via phasor recurrences re-anchored
    /// every 256 samples.
    std::vector<double> cavity_energy_series(const StiffnessSystem& system, double dt,
                                             std::size_t count) const;

private:
    const ModeBasis* modes_;
    std::vector<double> mass_;
    std::vector<double> a_;  // modal displacement at t0
    std::vector<double> b_;  // modal velocity at t0
    double t0_ = 0.0;
};

/// Femtoseconds per model time unit when one-site traversal at v_max = sqrt(k/m)
/// is pinned to 50 fs.
double fs_per_time_unit(double k, double m);

/// splitmix64, for seeded draws that must be reproducible across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();

private:
    std::uint64_t state_;
};

} // namespace wavesearch::dynamics
