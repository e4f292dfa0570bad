#include "wavesearch/cli/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "wavesearch/error.hpp"

namespace wavesearch::cli {

using nlohmann::json;

namespace {

const char* const kModule = "cli";

std::string line_of(const std::string& text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

// Walks one JSON object, remembering which keys were read; finish() rejects the rest.
class Reader {
public:
    Reader(const json& obj, std::string path, const std::string& text)
        : obj_(obj), path_(std::move(path)), text_(text) {
        if (!obj_.is_object()) fail(path_, "expected an object");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return obj_.at(key);
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const auto& v = raw(key);
        if (!v.is_number()) fail(where(key), "expected a number");
        return v.get<double>();
    }

    std::size_t count(const std::string& key, std::size_t fallback) {
        if (!has(key)) return fallback;
        const auto& v = raw(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) fail(where(key), "expected a non-negative integer");
        return v.get<std::size_t>();
    }

    std::optional<std::size_t> optional_count(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return count(key, 0);
    }

    std::uint64_t u64(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const auto& v = raw(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            fail(where(key), "expected an unsigned 64-bit integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const auto& v = raw(key);
        if (!v.is_boolean()) fail(where(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const auto& v = raw(key);
        if (!v.is_string()) fail(where(key), "expected a string");
        return v.get<std::string>();
    }

    std::pair<double, double> range(const std::string& key, std::pair<double, double> fallback) {
        if (!has(key)) return fallback;
        const auto& v = raw(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            fail(where(key), "expected [lower, upper]");
        return {v[0].get<double>(), v[1].get<double>()};
    }

    Reader child(const std::string& key) { return Reader(raw(key), where(key), text_); }

    std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            (void)value;
            if (!seen_.contains(key)) {
                const auto at = text_.find("\"" + key + "\"");
                const std::string loc = at == std::string::npos ? "" : " (" + line_of(text_, at) + ")";
                fail(where(key), "unknown key" + loc);
            }
        }
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& what) {
        throw Error(ErrorKind::config, kModule, "config " + path + ": " + what);
    }

private:
    const json& obj_;
    std::string path_;
    const std::string& text_;
    std::set<std::string> seen_;
};

lattice::NetworkSpec read_network(Reader r, const std::string& base_dir) {
    if (r.has("file")) {
        const auto file = r.string("file", "");
        r.finish();
        std::filesystem::path p(file);
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        std::ifstream in(p);
        if (!in) throw Error(ErrorKind::io, kModule, "cannot read network file " + p.string());
        std::stringstream ss;
        ss << in.rdbuf();
        json doc;
        try {
            doc = json::parse(ss.str());
        } catch (const json::parse_error& e) {
            throw Error(ErrorKind::config, kModule,
                        "network file " + p.string() + ": " + line_of(ss.str(), e.byte) + ": invalid JSON");
        }
        return lattice::network_from_json(doc);
    }
    const auto preset = r.string("preset", "");
    lattice::NetworkSpec spec;
    if (preset == "chain") {
        spec = lattice::build_chain(r.count("n", 16), r.number("m", 1.0), r.number("k", 1.0), r.number("k0", 0.0),
                                    lattice::boundary_from_string(r.string("boundary", "free")));
    } else if (preset == "ring") {
        spec = lattice::build_ring(r.count("n", 16), r.number("m", 1.0), r.number("k", 1.0), r.number("k0", 0.0));
    } else if (preset == "fmo") {
        spec = lattice::fmo_preset(r.number("k", 1.0), r.number("m", 1.0));
    } else {
        Reader::fail(r.where("preset"), "expected chain, ring or fmo (or give node_count/file)");
    }
    r.finish();
    return spec;
}

} // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::config, kModule, "config parse error at " + line_of(text, e.byte) + ": " + e.what());
    }

    RunConfig cfg;
    cfg.echo = doc;
    Reader top(doc, "", text);
    cfg.command = top.string("command", "");
    if (!cfg.command.empty()) {
        const auto& names = command_names();
        if (std::find(names.begin(), names.end(), cfg.command) == names.end())
            Reader::fail("command", "unknown command '" + cfg.command + "'");
    }
    cfg.seed = top.u64("seed", 0);
    cfg.output_dir = top.string("output_dir", "out");

    if (top.has("emit")) {
        auto r = top.child("emit");
        cfg.emit.csv = r.boolean("csv", true);
        cfg.emit.json = r.boolean("json", true);
        cfg.emit.svg = r.boolean("svg", true);
        r.finish();
    }

    if (top.has("network")) {
        const auto& net = top.raw("network");
        if (net.is_object() && net.contains("node_count")) {
            try {
                cfg.network = lattice::network_from_json(net);
            } catch (const ValidationError&) {
                throw;
            } catch (const Error& e) {
                throw Error(e.kind(), kModule, std::string("config ") + e.what());
            }
        } else {
            cfg.network = read_network(Reader(net, "network", text), base_dir);
        }
    }

    if (top.has("cavity")) {
        auto r = top.child("cavity");
        cfg.has_cavity = true;
        cfg.cavity.site = r.optional_count("site");
        cfg.cavity.mass = r.number("mass", 1.0);
        cfg.cavity.spring = r.number("spring", 0.0);
        cfg.cavity.onsite = r.number("onsite", 0.0);
        cfg.cavity.tune = r.boolean("tune", false);
        r.finish();
    }

    if (top.has("excitation")) {
        auto r = top.child("excitation");
        cfg.has_excitation = true;
        const auto kind = r.string("kind", "site");
        if (kind == "site") {
            cfg.excitation.kind = transport::ExcitationRecipe::Kind::site;
            cfg.excitation.site = r.count("site", 0);
            cfg.excitation.energy = r.number("energy", 1.0);
        } else if (kind == "pulse") {
            cfg.excitation.kind = transport::ExcitationRecipe::Kind::pulse;
            auto& p = cfg.excitation.pulse;
            p.center = r.number("center", 0.0);
            p.width = r.number("width", 4.0);
            p.q0 = r.number("q0", p.q0);
            p.amplitude = r.number("amplitude", 1.0);
            const double dir = r.number("direction", 1.0);
            if (dir != -1.0 && dir != 0.0 && dir != 1.0) Reader::fail("excitation.direction", "expected -1, 0 or 1");
            p.direction = static_cast<int>(dir);
        } else {
            Reader::fail("excitation.kind", "expected site or pulse");
        }
        r.finish();
    }

    if (top.has("simulate")) {
        auto r = top.child("simulate");
        auto& p = cfg.simulate;
        p.dt = r.number("dt", p.dt);
        p.t_final = r.number("t_final", p.t_final);
        p.gamma = r.number("gamma", p.gamma);
        p.record_stride = r.count("record_stride", p.record_stride);
        p.integrator = r.string("integrator", p.integrator);
        if (p.integrator != "verlet" && p.integrator != "exact")
            Reader::fail("simulate.integrator", "expected verlet or exact");
        p.calibrate_fs = r.boolean("calibrate_fs", p.calibrate_fs);
        r.finish();
    }
    if (top.has("dispersion")) {
        auto r = top.child("dispersion");
        auto& p = cfg.dispersion;
        p.k = r.number("k", p.k);
        p.m = r.number("m", p.m);
        p.points = r.count("points", p.points);
        r.finish();
    }
    if (top.has("scattering")) {
        auto r = top.child("scattering");
        auto& p = cfg.scattering;
        p.k = r.number("k", p.k);
        p.m = r.number("m", p.m);
        p.K = r.number("K", p.K);
        p.M = r.number("M", p.M);
        p.points = r.count("points", p.points);
        r.finish();
    }
    if (top.has("scan")) {
        auto r = top.child("scan");
        auto& p = cfg.scan;
        p.ring_n = r.count("ring_n", p.ring_n);
        p.k = r.number("k", p.k);
        p.m = r.number("m", p.m);
        p.cavity_mass = r.number("cavity_mass", p.cavity_mass);
        p.points = r.count("points", p.points);
        p.t_final = r.number("t_final", p.t_final);
        p.sample_dt = r.number("sample_dt", p.sample_dt);
        p.excitation_site = r.optional_count("excitation_site");
        r.finish();
    }
    if (top.has("baseline")) {
        auto r = top.child("baseline");
        auto& p = cfg.baseline;
        p.hop_rate = r.number("hop_rate", p.hop_rate);
        p.sink_site = r.optional_count("sink_site");
        p.sink_rate = r.number("sink_rate", p.sink_rate);
        p.initial_site = r.count("initial_site", p.initial_site);
        p.t_final = r.number("t_final", p.t_final);
        p.dt = r.number("dt", p.dt);
        p.spreading_nodes = r.count("spreading_nodes", p.spreading_nodes);
        p.wave_t_begin = r.number("wave_t_begin", p.wave_t_begin);
        p.wave_t_end = r.number("wave_t_end", p.wave_t_end);
        p.hop_t_begin = r.number("hop_t_begin", p.hop_t_begin);
        p.hop_t_end = r.number("hop_t_end", p.hop_t_end);
        p.samples = r.count("samples", p.samples);
        r.finish();
    }
    if (top.has("scaling")) {
        auto r = top.child("scaling");
        auto& p = cfg.scaling;
        if (r.has("sizes")) {
            const auto& v = r.raw("sizes");
            if (!v.is_array() || v.empty()) Reader::fail("scaling.sizes", "expected a non-empty array");
            p.sizes.clear();
            for (const auto& s : v) {
                if (!s.is_number_integer() || s.get<long long>() < 3)
                    Reader::fail("scaling.sizes", "ring sizes must be integers >= 3");
                p.sizes.push_back(s.get<std::size_t>());
            }
        }
        p.options.k = r.number("k", p.options.k);
        p.options.m = r.number("m", p.options.m);
        p.options.horizon_per_node = r.number("horizon_per_node", p.options.horizon_per_node);
        p.options.sample_dt = r.number("sample_dt", p.options.sample_dt);
        p.options.detune = r.number("detune", p.options.detune);
        p.options.grid = r.count("grid", p.options.grid);
        p.options.refine_evals = r.count("refine_evals", p.options.refine_evals);
        r.finish();
    }
    if (top.has("oracle_check")) {
        auto r = top.child("oracle_check");
        auto& p = cfg.oracle;
        p.chain_nodes = r.count("chain_nodes", p.chain_nodes);
        p.width = r.number("width", p.width);
        p.q0 = r.number("q0", p.q0);
        p.center = r.number("center", p.center);
        p.images_width = r.number("images_width", p.images_width);
        p.draws = r.count("draws", p.draws);
        p.band_points = r.count("band_points", p.band_points);
        r.finish();
    }
    auto read_tune = [](Reader& r, optimize::TuneOptions& o) {
        o.grid = r.count("grid", o.grid);
        const auto om = r.range("omega_bounds", {o.omega_lower, o.omega_upper});
        o.omega_lower = om.first;
        o.omega_upper = om.second;
        const auto ms = r.range("mass_bounds", {o.mass_lower, o.mass_upper});
        o.mass_lower = ms.first;
        o.mass_upper = ms.second;
        o.sample_dt = r.number("sample_dt", o.sample_dt);
        o.metric = optimize::metric_from_string(r.string("metric", optimize::to_string(o.metric)));
        o.refine.max_evals = r.count("refine_evals", o.refine.max_evals);
        o.refine.tol = r.number("refine_tol", o.refine.tol);
    };
    if (top.has("tune")) {
        auto r = top.child("tune");
        cfg.tune.t_final = r.number("t_final", cfg.tune.t_final);
        read_tune(r, cfg.tune.options);
        r.finish();
    }
    if (top.has("enumerate")) {
        auto r = top.child("enumerate");
        auto& o = cfg.enumerate.options;
        o.n = r.count("n", o.n);
        o.min_edges = r.count("min_edges", o.min_edges);
        o.max_edges = r.count("max_edges", o.max_edges);
        o.k = r.number("k", o.k);
        o.m = r.number("m", o.m);
        o.policy = optimize::policy_from_string(r.string("policy", optimize::to_string(o.policy)));
        o.horizon_per_node = r.number("horizon_per_node", o.horizon_per_node);
        o.top = r.count("top", o.top);
        o.tune.grid = 16;
        read_tune(r, o.tune);
        r.finish();
    }
    top.finish();
    return cfg;
}

lattice::NetworkSpec network_with_cavity(const RunConfig& config) {
    if (!config.network) throw Error(ErrorKind::config, kModule, "config has no network section");
    auto spec = *config.network;
    if (!config.has_cavity) return spec;
    std::size_t site = 0;
    if (config.cavity.site) {
        site = *config.cavity.site;
    } else if (spec == lattice::fmo_preset(spec.edges.empty() ? 1.0 : spec.edges[0].k, spec.masses[0])) {
        site = lattice::fmo_pigment(lattice::fmo_reaction_centre_pigment);
    } else {
        throw Error(ErrorKind::config, kModule, "config cavity.site is required for this network");
    }
    return lattice::attach_cavity(spec, site, config.cavity.mass, config.cavity.spring, config.cavity.onsite);
}

} // namespace wavesearch::cli
