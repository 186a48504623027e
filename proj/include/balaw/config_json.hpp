#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "balaw/flux_model.hpp"
#include "balaw/kinetic_geometry.hpp"
#include "balaw/regularity_estimator.hpp"

namespace balaw {

/// Configuration errors carry the offending key so the CLI can report it.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

namespace cfg {

using json = nlohmann::json;

inline json load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("config file not found: " + path);
    json j;
    try {
        is >> j;
    } catch (const json::parse_error& e) {
        throw config_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

template <typename T>
T require(const json& j, const std::string& key) {
    if (!j.contains(key)) throw config_error("missing key: " + key);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error("bad value for key '" + key + "': " + e.what());
    }
}

template <typename T>
T optional(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error("bad value for key '" + key + "': " + e.what());
    }
}

/// Flux description: {"kind": "burgers_family", "d": 2} or
/// {"kind": "polynomial", "components": [[c0, c1, ...], ...]} or
/// {"kind": "tabulated", "components": [[samples...], ...]}.
inline FluxModel parse_flux(const json& j) {
    auto kind = require<std::string>(j, "kind");
    if (kind == "burgers_family") return FluxModel::burgers(require<int>(j, "d"));
    if (kind == "polynomial")
        return FluxModel::polynomial(require<std::vector<std::vector<double>>>(j, "components"));
    if (kind == "tabulated")
        return FluxModel::tabulated(require<std::vector<std::vector<double>>>(j, "components"));
    throw config_error("unknown flux kind: " + kind);
}

inline Geometry parse_geometry(const json& j, const std::string& key, Geometry fallback) {
    auto s = optional<std::string>(j, key, fallback == Geometry::ball ? "ball" : "cube");
    if (s == "ball") return Geometry::ball;
    if (s == "cube") return Geometry::cube;
    throw config_error("bad value for key '" + key + "': expected ball or cube");
}

inline BootstrapVariant parse_variant(const std::string& s) {
    if (s == "alpha_nonlinear") return BootstrapVariant::alpha_nonlinear;
    if (s == "nondegenerate") return BootstrapVariant::nondegenerate;
    if (s == "burgers_1d") return BootstrapVariant::burgers_1d;
    throw config_error("unknown bootstrap variant: " + s);
}

}  // namespace cfg
}  // namespace balaw
