#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wavesearch/lattice.hpp"
#include "wavesearch/optimize.hpp"
#include "wavesearch/transport.hpp"

namespace wavesearch::cli {

inline constexpr const char* tool_version = "wavesearch 1.0.0";

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"simulate", "dispersion", "scattering",
                                                "scan",     "baseline",   "scaling",
                                                "oracle-check", "tune",   "enumerate"};
    return names;
}

struct EmitFlags {
    bool csv = true;
    bool json = true;
    bool svg = true;
};

struct CavityConfig {
    std::optional<std::size_t> site;  // fmo preset defaults to pigment 3
    double mass = 1.0;
    double spring = 0.0;
    double onsite = 0.0;
    bool tune = false;
};

struct SimulateParams {
    double dt = 0.0;  // 0: 0.05 / omega_max
    double t_final = 100.0;
    double gamma = 0.0;
    std::size_t record_stride = 1;
    std::string integrator = "verlet";  // or "exact"
    bool calibrate_fs = false;
};

struct DispersionParams {
    double k = 1.0;
    double m = 1.0;
    std::size_t points = 64;
};

struct ScatteringParams {
    double k = 1.0;
    double m = 1.0;
    double K = 1.0;
    double M = 1.0;
    std::size_t points = 100;
};

struct ScanParams {
    std::size_t ring_n = 16;
    double k = 1.0;
    double m = 1.0;
    double cavity_mass = 0.003;
    std::size_t points = 64;
    double t_final = 2000.0;
    double sample_dt = 0.25;
    std::optional<std::size_t> excitation_site;  // default: opposite the target
};

struct BaselineParams {
    double hop_rate = 1.0;
    std::optional<std::size_t> sink_site;
    double sink_rate = 1.0;
    std::size_t initial_site = 0;
    double t_final = 50.0;
    double dt = 0.0;  // 0: the stability limit
    std::size_t spreading_nodes = 256;
    double wave_t_begin = 2.0;
    double wave_t_end = 100.0;
    double hop_t_begin = 1.0;
    double hop_t_end = 300.0;
    std::size_t samples = 24;
};

struct ScalingParams {
    std::vector<std::size_t> sizes{8, 16, 32};
    transport::ScalingOptions options;
};

struct OracleParams {
    std::size_t chain_nodes = 128;
    double width = 8.0;
    double q0 = 1.5707963267948966;
    double center = 32.0;
    double images_width = 6.0;
    std::size_t draws = 10;
    std::size_t band_points = 100;
};

struct TuneParams {
    double t_final = 0.0;  // 0: 80 * node_count
    optimize::TuneOptions options;
};

struct EnumerateParams {
    optimize::EnumerateOptions options;
};

struct RunConfig {
    std::string command;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    EmitFlags emit;
    std::optional<lattice::NetworkSpec> network;
    CavityConfig cavity;
    bool has_cavity = false;
    transport::ExcitationRecipe excitation;
    bool has_excitation = false;

    SimulateParams simulate;
    DispersionParams dispersion;
    ScatteringParams scattering;
    ScanParams scan;
    BaselineParams baseline;
    ScalingParams scaling;
    OracleParams oracle;
    TuneParams tune;
    EnumerateParams enumerate;

    nlohmann::json echo;  // the document as given
};

/// Strict parse. Unknown keys are reported with their path and line.
/// `base_dir` resolves relative network file paths.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");

/// Network with the configured cavity attached (if any); fmo cavity defaults to pigment 3.
lattice::NetworkSpec network_with_cavity(const RunConfig& config);

} // namespace wavesearch::cli
