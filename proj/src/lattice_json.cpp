#include <set>
#include <string>

#include "wavesearch/error.hpp"
#include "wavesearch/lattice.hpp"

namespace wavesearch::lattice {

using nlohmann::json;

namespace {

const char* const kModule = "lattice";

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::config, kModule, path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& known) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!known.contains(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
    }
}

double number_at(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

std::size_t index_at(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
        fail(path, "expected a non-negative integer");
    return v.get<std::size_t>();
}

std::vector<double> numbers_at(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(number_at(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

} // namespace

json to_json(const NetworkSpec& spec) {
    json edges = json::array();
    for (const auto& e : spec.edges) edges.push_back(json::array({e.i, e.j, e.k}));
    json doc = {
        {"node_count", spec.node_count},
        {"masses", spec.masses},
        {"onsite_springs", spec.onsite_springs},
        {"edges", edges},
        {"boundary", to_string(spec.boundary)},
    };
    if (spec.cavity) {
        doc["cavity"] = {
            {"target_site", spec.cavity->target_site},
            {"cavity_mass", spec.cavity->mass},
            {"cavity_spring", spec.cavity->spring},
            {"cavity_onsite", spec.cavity->onsite},
        };
    }
    return doc;
}

NetworkSpec network_from_json(const json& doc) {
    reject_unknown(doc, "network",
                   {"node_count", "masses", "onsite_springs", "edges", "boundary", "cavity"});
    for (const char* required : {"node_count", "masses", "onsite_springs", "edges"})
        if (!doc.contains(required)) fail(std::string("network.") + required, "missing");

    NetworkSpec spec;
    spec.node_count = index_at(doc["node_count"], "network.node_count");
    spec.masses = numbers_at(doc["masses"], "network.masses");
    spec.onsite_springs = numbers_at(doc["onsite_springs"], "network.onsite_springs");

    const auto& edges = doc["edges"];
    if (!edges.is_array()) fail("network.edges", "expected an array");
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const std::string path = "network.edges[" + std::to_string(e) + "]";
        const auto& row = edges[e];
        if (!row.is_array() || row.size() != 3) fail(path, "expected [i, j, k]");
        spec.edges.push_back(
            {index_at(row[0], path + "[0]"), index_at(row[1], path + "[1]"), number_at(row[2], path + "[2]")});
    }

    if (doc.contains("boundary")) {
        if (!doc["boundary"].is_string()) fail("network.boundary", "expected a string");
        spec.boundary = boundary_from_string(doc["boundary"].get<std::string>());
    }

    if (doc.contains("cavity")) {
        const auto& c = doc["cavity"];
        reject_unknown(c, "network.cavity",
                       {"target_site", "cavity_mass", "cavity_spring", "cavity_onsite"});
        for (const char* required : {"target_site", "cavity_mass", "cavity_spring"})
            if (!c.contains(required)) fail(std::string("network.cavity.") + required, "missing");
        Cavity cavity;
        cavity.target_site = index_at(c["target_site"], "network.cavity.target_site");
        cavity.mass = number_at(c["cavity_mass"], "network.cavity.cavity_mass");
        cavity.spring = number_at(c["cavity_spring"], "network.cavity.cavity_spring");
        if (c.contains("cavity_onsite"))
            cavity.onsite = number_at(c["cavity_onsite"], "network.cavity.cavity_onsite");
        spec.cavity = cavity;
    }

    require_valid(spec);
    return spec;
}

} // namespace wavesearch::lattice
