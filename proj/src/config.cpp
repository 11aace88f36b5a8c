#include "escape/config.hpp"

#include "escape/errors.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

namespace escape {

namespace {

using nlohmann::json;

Point2<double> parse_point(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError(what + " must be [x, y]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

json point_json(const Point2<double>& p) { return json::array({p.x, p.y}); }

std::vector<Waypoint> parse_waypoints(const json& j, const std::string& what) {
    if (!j.is_array()) {
        throw ConfigError(what + " must be a list of [t, x, y]");
    }
    std::vector<Waypoint> out;
    for (const auto& w : j) {
        if (!w.is_array() || w.size() != 3 || !w[0].is_number() || !w[1].is_number() || !w[2].is_number()) {
            throw ConfigError(what + " entries must be [t, x, y]");
        }
        out.push_back({w[0].get<double>(), {w[1].get<double>(), w[2].get<double>()}});
    }
    return out;
}

json waypoints_json(const std::vector<Waypoint>& ws) {
    json out = json::array();
    for (const auto& w : ws) {
        out.push_back(json::array({w.t, w.p.x, w.p.y}));
    }
    return out;
}

LionController parse_controller(const json& j, const Point2<double>& start, std::size_t index) {
    const std::string where = "lion " + std::to_string(index + 1) + " controller";
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw ConfigError(where + " needs a string 'kind'");
    }
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "stationary") {
        return Stationary{};
    }
    if (kind == "pure_pursuit") {
        return PurePursuit{};
    }
    if (kind == "goal_ambush") {
        GoalAmbush g;
        if (j.contains("goal_visible")) {
            if (!j["goal_visible"].is_boolean()) {
                throw ConfigError(where + ": goal_visible must be a boolean");
            }
            g.goal_visible = j["goal_visible"].get<bool>();
        }
        return g;
    }
    if (kind == "scripted") {
        if (j.contains("orbit")) {
            const json& o = j["orbit"];
            if (!o.is_object() || !o.contains("center") || !o.contains("radius") || !o.contains("until")) {
                throw ConfigError(where + ": orbit needs center, radius and until");
            }
            const double radius = o["radius"].get<double>();
            const double until = o["until"].get<double>();
            if (!(radius > 0.0) || !(until > 0.0)) {
                throw ConfigError(where + ": orbit radius and until must be positive");
            }
            return scripted_orbit(start, parse_point(o["center"], where + " orbit center"), radius, until);
        }
        if (!j.contains("waypoints")) {
            throw ConfigError(where + ": scripted needs waypoints or orbit");
        }
        return Scripted{parse_waypoints(j["waypoints"], where + " waypoints")};
    }
    if (kind == "replay") {
        if (!j.contains("samples")) {
            throw ConfigError(where + ": replay needs samples");
        }
        return Replay{parse_waypoints(j["samples"], where + " samples")};
    }
    throw ConfigError(where + ": unknown kind '" + kind + "'");
}

json controller_json(const LionController& c) {
    json out;
    out["kind"] = std::string(controller_kind(c));
    if (const auto* g = std::get_if<GoalAmbush>(&c)) {
        out["goal_visible"] = g->goal_visible;
    } else if (const auto* s = std::get_if<Scripted>(&c)) {
        out["waypoints"] = waypoints_json(s->waypoints);
    } else if (const auto* r = std::get_if<Replay>(&c)) {
        out["samples"] = waypoints_json(r->samples);
    }
    return out;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j[key].get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("'") + key + "' has the wrong type");
    }
}

GameConfig from_json(const json& j) {
    if (!j.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    static const std::array<const char*, 9> known = {"eps",   "man_start",      "lions",     "level",
                                                     "horizon", "substep_factor", "precision", "delta_override",
                                                     "record_levels"};
    for (const auto& [key, value] : j.items()) {
        if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) == known.end()) {
            throw ConfigError("unknown key '" + key + "'");
        }
    }
    for (const char* key : {"eps", "man_start", "lions", "level", "horizon"}) {
        if (!j.contains(key)) {
            throw ConfigError(std::string("missing key '") + key + "'");
        }
    }
    GameConfig c;
    if (!j["eps"].is_number()) {
        throw ConfigError("'eps' must be a number");
    }
    c.start.eps = j["eps"].get<double>();
    c.start.man_start = parse_point(j["man_start"], "man_start");
    if (!j["lions"].is_array()) {
        throw ConfigError("'lions' must be a list");
    }
    for (const auto& l : j["lions"]) {
        if (!l.is_object() || !l.contains("start")) {
            throw ConfigError("every lion needs a start");
        }
        c.start.lion_starts.push_back(parse_point(l["start"], "lion start"));
    }
    std::size_t i = 0;
    for (const auto& l : j["lions"]) {
        const json ctrl = l.contains("controller") ? l["controller"] : json{{"kind", "pure_pursuit"}};
        c.controllers.push_back(parse_controller(ctrl, c.start.lion_starts[i], i));
        ++i;
    }
    if (!j["level"].is_number_integer()) {
        throw ConfigError("'level' must be an integer");
    }
    c.level_n = j["level"].get<int>();
    const json& h = j["horizon"];
    if (!h.is_object()) {
        throw ConfigError("'horizon' must be {time: T} or {intervals: count}");
    }
    if (h.contains("time")) {
        if (!h["time"].is_number()) {
            throw ConfigError("horizon time must be a number");
        }
        c.horizon.time = h["time"].get<double>();
    }
    if (h.contains("intervals")) {
        if (!h["intervals"].is_number_integer()) {
            throw ConfigError("horizon intervals must be an integer");
        }
        c.horizon.intervals = h["intervals"].get<std::int64_t>();
    }
    c.substep_factor = get_or<int>(j, "substep_factor", 16);
    try {
        c.precision = parse_precision(get_or<std::string>(j, "precision", "standard"));
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (j.contains("delta_override") && !j["delta_override"].is_null()) {
        c.delta_override = get_or<std::vector<double>>(j, "delta_override", {});
    }
    c.record_levels = get_or<std::vector<int>>(j, "record_levels", {});
    c.validate();
    return c;
}

}  // namespace

GameConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    try {
        return from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError(e.what());
    }
}

std::string serialize_config(const GameConfig& c, int indent) {
    json j;
    j["eps"] = c.start.eps;
    j["man_start"] = point_json(c.start.man_start);
    json lions = json::array();
    for (std::size_t i = 0; i < c.start.lion_starts.size(); ++i) {
        lions.push_back({{"start", point_json(c.start.lion_starts[i])}, {"controller", controller_json(c.controllers[i])}});
    }
    j["lions"] = lions;
    j["level"] = c.level_n;
    if (c.horizon.time) {
        j["horizon"] = {{"time", *c.horizon.time}};
    } else {
        j["horizon"] = {{"intervals", c.horizon.intervals.value_or(0)}};
    }
    j["substep_factor"] = c.substep_factor;
    j["precision"] = std::string(to_string(c.precision));
    j["delta_override"] = c.delta_override ? json(*c.delta_override) : json(nullptr);
    j["record_levels"] = c.recorded_levels();
    return j.dump(indent);
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

std::string config_digest(const GameConfig& config) { return sha256_hex(serialize_config(config)); }

GameConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace escape
