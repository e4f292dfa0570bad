#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wavesearch/dynamics.hpp"
#include "wavesearch/lattice.hpp"
#include "wavesearch/modes.hpp"

namespace wavesearch::transport {

using dynamics::PulseParams;
using dynamics::State;
using dynamics::Trajectory;
using lattice::NetworkSpec;
using lattice::StiffnessSystem;
using modes::ModeBasis;

/// How the initial energy enters the network.
struct ExcitationRecipe {
    enum class Kind { site, pulse };
    Kind kind = Kind::site;
    std::size_t site = 0;
    double energy = 1.0;
    PulseParams pulse;

    static ExcitationRecipe at_site(std::size_t site, double energy = 1.0) {
        return {Kind::site, site, energy, {}};
    }
};

dynamics::Excitation excite(const StiffnessSystem& system, const ModeBasis& modes,
                            const ExcitationRecipe& recipe);

// ---------------------------------------------------------------- capture

struct CaptureReport {
    double eta = 0.0;            // max of cavity_energy / total(0)
    double t_peak = 0.0;
    double trap_duration = 0.0;  // contiguous span around t_peak at >= half the peak
    std::vector<double> times;
    std::vector<double> capture_curve;
};

struct Window {
    double t_begin = 0.0;
    double t_end = std::numeric_limits<double>::infinity();
};

CaptureReport capture_report(const StiffnessSystem& system, const Trajectory& trajectory,
                             Window window = {});

/// Capture metrics from cavity energies sampled at t0 + i*dt.
CaptureReport capture_from_series(std::span<const double> cavity_energy, double t0, double dt,
                                  double initial_energy);

/// Exact modal evolution sampled every sample_dt up to t_final.
CaptureReport exact_capture(const StiffnessSystem& system, const ModeBasis& modes,
                            const State& state0, double t_final, double sample_dt = 0.25);

// ---------------------------------------------------------------- hard-wall oracle

/// Doubled free chain (2n+1 nodes) holding the pulse and its inverted mirror image.
struct ImagesSetup {
    StiffnessSystem doubled;
    ModeBasis modes;
    State state0;
    std::size_t wall_index = 0;  // node n; physical node i sits at n+1+i
    std::size_t physical_nodes = 0;
};

/// Requires a uniform fixed_left chain without cavity; pulse given in physical coordinates.
ImagesSetup images_setup(const NetworkSpec& chain_spec, const PulseParams& pulse);

/// State of the doubled chain at time t (wall node included).
State images_doubled_state(const ImagesSetup& setup, double t);

/// Doubled-chain evolution restricted to the physical half.
State images_reference(const NetworkSpec& chain_spec, const PulseParams& pulse, double t);
State images_restrict(const ImagesSetup& setup, const State& doubled);

struct FidelityReport {
    double overlap = 0.0;      // against the unflipped mirror-phase packet
    double t_eval = 0.0;
    double distortion = 0.0;   // 1 - |overlap|
    double centroid = 0.0;     // energy centroid at t_eval
    bool wall = false;
};

/// Packet launched toward node 0 (direction -1) and evaluated once it has returned.
FidelityReport reflection_fidelity(const NetworkSpec& chain_spec, const PulseParams& pulse);

// ---------------------------------------------------------------- beam splitter

struct TransmissionProbe {
    std::size_t chain_nodes = 401;
    std::size_t cavity_site = 200;
    double center = 100.0;
    double width = 8.0;
    double q0 = 1.5707963267948966;
    double cavity_mass = 1.0;
};

struct TransmissionResult {
    double omega = 0.0;        // carrier frequency, cavity tuned to it
    double t_eval = 0.0;
    double transmitted = 0.0;  // energy beyond the cavity site / initial
    double reflected = 0.0;    // energy before the cavity site / initial
    double predicted_s2 = 0.0; // |s|^2 at the carrier
};

/// Right-moving packet through a side branch with sqrt(K/M) equal to the carrier.
TransmissionResult time_domain_transmission(double k, double m, const TransmissionProbe& probe);

// ---------------------------------------------------------------- resonance scan

struct ScanPoint {
    double omega = 0.0;
    double spring = 0.0;
    bool in_band = true;
    CaptureReport capture;
};

struct ScanPeak {
    std::size_t index = 0;
    double omega = 0.0;  // parabolic refinement
    double eta = 0.0;
};

struct ScanOptions {
    double k = 1.0;
    double m = 1.0;
    double cavity_mass = 0.003;
    std::size_t target = 0;
    double t_final = 2000.0;
    double sample_dt = 0.25;
    unsigned jobs = 1;
};

struct ScanResult {
    std::vector<ScanPoint> points;
    std::vector<ScanPeak> peaks;
};

/// eta(Omega) with K = M Omega^2 on a fixed network. Out-of-band points are run and flagged.
ScanResult resonance_scan(const NetworkSpec& base, std::span<const double> omega_grid,
                          const ExcitationRecipe& recipe, const ScanOptions& options);

/// Local maxima over +-2 points above 5% of the scan maximum, refined by a parabola.
std::vector<ScanPeak> find_peaks(std::span<const double> x, std::span<const double> y);

/// n points uniform in wavenumber: Omega_i = 2 sqrt(k/m) sin(q_i / 2), q_i = pi (i + 1/2) / n.
std::vector<double> wavenumber_grid(std::size_t n, double k, double m);

// ---------------------------------------------------------------- hopping baseline

struct HoppingSystem {
    std::vector<std::vector<std::size_t>> neighbours;
    double hop_rate = 1.0;
    std::optional<std::size_t> sink_site;
    double sink_rate = 0.0;
    std::vector<double> occupation;
};

HoppingSystem make_hopping(const NetworkSpec& spec, double hop_rate, std::vector<double> initial,
                           std::optional<std::size_t> sink_site = std::nullopt,
                           double sink_rate = 0.0);

/// dt <= 0.1 / (hop_rate * max_degree + sink_rate)
double hopping_stability_limit(const HoppingSystem& system);

struct HoppingResult {
    double dt = 0.0;
    std::size_t record_stride = 1;
    std::vector<double> times;
    std::vector<double> absorbed;
    std::vector<std::vector<double>> occupations;  // per record when requested
    double initial_total = 0.0;
    double min_occupation = 0.0;
};

HoppingResult hopping_baseline(const HoppingSystem& system, double t_final, double dt,
                               std::size_t record_stride = 1, bool keep_occupations = false);

// ---------------------------------------------------------------- spreading

struct WidthCurve {
    std::vector<double> times;
    std::vector<double> sigma;
    std::vector<double> edge_share;  // end-node share of the distribution per sample
};

/// sigma^2 = sum (n - origin)^2 e_n / sum e_n with node index as position.
double distribution_width(std::span<const double> weights, double origin);

WidthCurve wave_width_curve(const StiffnessSystem& system, const ModeBasis& modes,
                            const State& state0, std::span<const double> times, double origin);

WidthCurve hopping_width_curve(const HoppingResult& result, std::span<const double> times,
                               double origin);

std::vector<double> log_times(double t_begin, double t_end, std::size_t count);

/// Least-squares slope of log sigma against log t.
double spreading_exponent(const WidthCurve& curve);

// ---------------------------------------------------------------- scaling

struct ScalingOptions {
    double k = 1.0;
    double m = 1.0;
    double horizon_per_node = 80.0;
    double sample_dt = 0.25;
    double detune = 0.3;
    std::size_t grid = 32;
    std::size_t refine_evals = 200;
    unsigned jobs = 1;
};

struct ScalingRow {
    std::size_t n = 0;
    double omega = 0.0;
    double cavity_mass = 0.0;
    double cavity_spring = 0.0;
    double eta_tuned = 0.0;
    double omega_detuned = 0.0;
    double eta_detuned = 0.0;
    double eta_uncoupled = 0.0;  // K = 0
    double uniform_share = 0.0;  // 1/N
};

struct ScalingStudy {
    std::vector<ScalingRow> rows;
    bool floor_ok = false;     // eta_tuned >= 5/N everywhere
    bool collapse_ok = false;  // eta_tuned(last) / eta_tuned(first) >= 0.5
    double ratio = 0.0;
    std::string falsification;  // empty when both hold
};

/// Ring of N with the cavity at node 0, impulse at the opposite node, horizon
/// horizon_per_node * N; cavity tuned with the optimizer, detuned control at
/// Omega (1 + detune) (or 1 - detune when that leaves the band).
ScalingStudy scaling_study(std::span<const std::size_t> ring_sizes, const ScalingOptions& options);

} // namespace wavesearch::transport
