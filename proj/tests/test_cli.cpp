#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wavesearch/cli/commands.hpp"
#include "wavesearch/cli/config.hpp"
#include "wavesearch/cli/output.hpp"
#include "wavesearch/error.hpp"

using namespace wavesearch;
using namespace wavesearch::cli;
using nlohmann::json;

namespace {

std::string message_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("minimal config gets defaults") {
    const auto cfg = parse_config(R"({"command": "simulate", "network": {"preset": "chain", "n": 8}})");
    CHECK(cfg.command == "simulate");
    CHECK(cfg.seed == 0);
    CHECK(cfg.output_dir == "out");
    CHECK(cfg.simulate.integrator == "verlet");
    CHECK(cfg.simulate.dt == 0.0);
    REQUIRE(cfg.network);
    CHECK(cfg.network->node_count == 8);
    CHECK(cfg.emit.csv);
}

TEST_CASE("unknown keys are rejected with path and line") {
    const auto msg = message_of("{\n  \"command\": \"simulate\",\n  \"cavty\": {}\n}");
    CHECK(msg.find("cavty") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);

    const auto nested = message_of(R"({"simulate": {"t_finl": 3}})");
    CHECK(nested.find("simulate.t_finl") != std::string::npos);

    CHECK(message_of("{\n\"command\": }").find("line 2") != std::string::npos);
    CHECK_FALSE(message_of(R"({"command": "fly"})").empty());
}

TEST_CASE("inline network errors carry the field path") {
    const auto msg = message_of(
        R"({"network": {"node_count": 2, "masses": [1, -1], "onsite_springs": [0, 0], "edges": [[0, 1, 1]]}})");
    CHECK(msg.find("mass must be positive") != std::string::npos);
}

TEST_CASE("fmo cavity defaults to pigment 3") {
    const auto cfg = parse_config(R"({"network": {"preset": "fmo"}, "cavity": {"mass": 1, "spring": 1}})");
    const auto net = network_with_cavity(cfg);
    REQUIRE(net.cavity);
    CHECK(net.cavity->target_site == 2);
}

TEST_CASE("csv and svg emitters") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(2.0) == "2");
    CsvTable t({"a", "b"});
    t.row({"1", "x,y"});
    CHECK(t.str() == "a,b\n1,\"x,y\"\n");

    const auto svg = emit_svg({{"s", {0, 1, 2}, {0, 1, 4}, ""}}, {"T", "x", "y", false, false, {1.0}});
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("width=\"720\"") != std::string::npos);
    CHECK(emit_svg({{"s", {0, 1, 2}, {0, 1, 4}, ""}}, {"T", "x", "y", false, false, {1.0}}) == svg);
    CHECK_THROWS_AS(emit_svg({{"s", {}, {}, ""}}, {"T", "x", "y", false, false, {}}), Error);
    CHECK_THROWS_AS(emit_svg({}, {"T", "x", "y", false, false, {}}), Error);
}

TEST_CASE("simulate bundle") {
    const auto cfg = parse_config(R"({
        "command": "simulate",
        "network": {"preset": "fmo"},
        "cavity": {"site": 2, "mass": 1, "spring": 0.5},
        "excitation": {"kind": "site", "site": 0},
        "simulate": {"t_final": 20, "record_stride": 10}
    })");
    const auto b = execute(cfg);
    REQUIRE(b.files.count("trajectory.csv"));
    REQUIRE(b.files.count("summary.json"));
    CHECK(b.files.count("trajectory.svg"));
    const auto header = b.files.at("trajectory.csv").substr(0, b.files.at("trajectory.csv").find('\n'));
    CHECK(header.rfind("time,total,cavity_energy,site_0", 0) == 0);
    const auto summary = json::parse(b.files.at("summary.json"));
    CHECK(summary["command"] == "simulate");
    CHECK(execute(cfg).files == b.files);
}

TEST_CASE("invalid dt is a guard error") {
    const auto cfg = parse_config(R"({
        "command": "simulate",
        "network": {"preset": "ring", "n": 8},
        "excitation": {"kind": "site", "site": 0},
        "simulate": {"dt": 1.0, "t_final": 5}
    })");
    try {
        execute(cfg);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::guard);
        CHECK(e.is_input_error());
    }
}

TEST_CASE("emit flags drop outputs") {
    const auto cfg = parse_config(R"({"command": "dispersion", "emit": {"svg": false, "json": false}})");
    const auto b = execute(cfg);
    CHECK(b.files.size() == 1);
    CHECK(b.files.count("dispersion.csv"));
}

TEST_CASE("schema lists every csv") {
    const auto s = schema_text();
    for (const char* f : {"trajectory.csv", "dispersion.csv", "scattering.csv", "scan.csv", "hopping.csv",
                          "widths.csv", "scaling.csv", "oracle.csv", "trace.csv", "topologies.csv"})
        CHECK(s.find(f) != std::string::npos);
}

TEST_CASE("main entry writes error json and exit codes") {
    const auto dir = std::filesystem::temp_directory_path() / "wavesearch_cli_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto cfg_path = (dir / "bad.json").string();
    std::ofstream(cfg_path) << R"({"command": "simulate", "network": {"preset": "ring", "n": 8},
        "excitation": {"kind": "site", "site": 0}, "simulate": {"dt": 2.0}})";
    const auto out = (dir / "out").string();
    std::string a0 = "wavesearch", a1 = "simulate", a2 = "--config", a4 = "--out";
    std::string a3 = cfg_path, a5 = out;
    char* argv[] = {a0.data(), a1.data(), a2.data(), a3.data(), a4.data(), a5.data()};
    CHECK(main_entry(6, argv) == 2);
    std::ifstream in(dir / "out" / "error.json");
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto doc = json::parse(ss.str());
    CHECK(doc["error"]["kind"] == "guard");
    CHECK(doc["exit_code"] == 2);
    CHECK(doc["error"]["message"].get<std::string>().find("stability guard") != std::string::npos);

    std::string m1 = "scan";
    char* mismatch[] = {a0.data(), m1.data(), a2.data(), a3.data(), a4.data(), a5.data()};
    CHECK(main_entry(6, mismatch) == 2);
    std::filesystem::remove_all(dir);
}
