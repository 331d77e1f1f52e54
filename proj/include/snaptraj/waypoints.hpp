#ifndef SNAPTRAJ_WAYPOINTS_HPP
#define SNAPTRAJ_WAYPOINTS_HPP

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "snaptraj/types.hpp"

namespace snaptraj {

/// One named channel of a waypoint document. `positions` is shorthand for
/// fixing derivative order 0 at every boundary; rest_endpoints fixes orders
/// 1..s-1 to zero at the first and last boundary unless an explicit record
/// overrides them.
struct ChannelSpec {
    int s = 5;
    int n = 10;
    std::vector<double> positions;
    std::vector<FixedDerivative> fixed;
    bool rest_endpoints = true;
};

struct WaypointDocument {
    std::vector<double> times;
    std::vector<std::pair<std::string, ChannelSpec>> channels;

    int segment_count() const { return static_cast<int>(times.size()) - 1; }
};

inline WaypointDocument parse_waypoints(const nlohmann::json& j) {
    WaypointDocument doc;
    if (!j.is_object())
        throw ValidationError("waypoint document must be a JSON object");
    if (!j.contains("times") || !j["times"].is_array())
        throw ValidationError("waypoint document needs a \"times\" array");
    for (const auto& t : j["times"]) {
        if (!t.is_number())
            throw ValidationError("\"times\" entries must be numbers");
        doc.times.push_back(t.get<double>());
    }
    if (doc.times.size() < 2)
        throw ValidationError("\"times\" needs at least two knots");
    if (!j.contains("channels") || !j["channels"].is_object() ||
        j["channels"].empty())
        throw ValidationError(
            "waypoint document needs a non-empty \"channels\" object");

    for (const auto& [name, cj] : j["channels"].items()) {
        if (!cj.is_object())
            throw ValidationError("channel \"" + name +
                                  "\" must be an object");
        ChannelSpec ch;
        ch.s = cj.value("s", name == "yaw" ? 3 : 5);
        ch.n = cj.value("n", 2 * ch.s);
        ch.rest_endpoints = cj.value("rest_endpoints", true);
        if (cj.contains("positions")) {
            if (!cj["positions"].is_array())
                throw ValidationError("channel \"" + name +
                                      "\": \"positions\" must be an array");
            for (const auto& p : cj["positions"])
                ch.positions.push_back(p.get<double>());
            if (ch.positions.size() != doc.times.size())
                throw ValidationError(
                    "channel \"" + name + "\": positions list has " +
                    std::to_string(ch.positions.size()) + " entries for " +
                    std::to_string(doc.times.size()) + " boundaries");
        }
        if (cj.contains("fixed")) {
            if (!cj["fixed"].is_array())
                throw ValidationError("channel \"" + name +
                                      "\": \"fixed\" must be an array");
            for (const auto& r : cj["fixed"]) {
                FixedDerivative f;
                f.boundary = r.at("boundary").get<int>();
                f.order = r.at("order").get<int>();
                f.value = r.at("value").get<double>();
                ch.fixed.push_back(f);
            }
        }
        if (ch.positions.empty() && ch.fixed.empty())
            throw ValidationError("channel \"" + name +
                                  "\" fixes nothing; give \"positions\" or "
                                  "\"fixed\" records");
        doc.channels.emplace_back(name, std::move(ch));
    }
    return doc;
}

inline nlohmann::json to_json(const WaypointDocument& doc) {
    nlohmann::json j;
    j["times"] = doc.times;
    j["channels"] = nlohmann::json::object();
    for (const auto& [name, ch] : doc.channels) {
        nlohmann::json cj;
        cj["s"] = ch.s;
        cj["n"] = ch.n;
        if (!ch.positions.empty())
            cj["positions"] = ch.positions;
        if (!ch.fixed.empty()) {
            cj["fixed"] = nlohmann::json::array();
            for (const auto& f : ch.fixed)
                cj["fixed"].push_back({{"boundary", f.boundary},
                                       {"order", f.order},
                                       {"value", f.value}});
        }
        if (!ch.rest_endpoints)
            cj["rest_endpoints"] = false;
        j["channels"][name] = std::move(cj);
    }
    return j;
}

/// Expand one channel into a solvable problem: explicit records win, then
/// the positions shorthand, then the rest-endpoint defaults.
inline ProblemSpec channel_problem(const WaypointDocument& doc,
                                   const ChannelSpec& ch) {
    ProblemSpec spec;
    spec.segment_count = doc.segment_count();
    spec.coeff_count = ch.n;
    spec.continuity_depth = ch.s;
    spec.grid = TimeGrid(doc.times);

    const int k = spec.segment_count;
    if (!ch.positions.empty() &&
        ch.positions.size() != static_cast<std::size_t>(k + 1))
        throw ValidationError("positions list has " +
                              std::to_string(ch.positions.size()) +
                              " entries for " + std::to_string(k + 1) +
                              " boundaries");
    std::vector<std::vector<bool>> present(
        k + 1, std::vector<bool>(std::max(ch.s, 1), false));
    auto add = [&](int boundary, int order, double value) {
        spec.constraints.fixed.push_back({boundary, order, value});
        if (boundary >= 0 && boundary <= k && order >= 0 && order < ch.s)
            present[boundary][order] = true;
    };
    for (const auto& f : ch.fixed)
        add(f.boundary, f.order, f.value);
    for (std::size_t b = 0; b < ch.positions.size(); ++b)
        if (!present[b][0])
            add(static_cast<int>(b), 0, ch.positions[b]);
    if (ch.rest_endpoints)
        for (int boundary : {0, k})
            for (int r = 1; r < ch.s; ++r)
                if (!present[boundary][r])
                    add(boundary, r, 0.0);
    return spec;
}

/// Uniform double in [-1, 1) from the top 53 bits of the engine output, so
/// the stream is identical on every platform.
inline double unit_step(std::mt19937_64& eng) {
    return 2.0 * (static_cast<double>(eng() >> 11) * 0x1.0p-53) - 1.0;
}

/// Walk document: knots at 0..k seconds, one position channel whose
/// waypoints accumulate uniform steps from [-1, 1).
inline WaypointDocument random_walk_document(int k, std::uint64_t seed) {
    if (k < 1)
        throw ValidationError("random walk needs at least one segment");
    WaypointDocument doc;
    std::mt19937_64 eng(seed);
    ChannelSpec ch;
    double pos = 0.0;
    doc.times.reserve(k + 1);
    ch.positions.reserve(k + 1);
    doc.times.push_back(0.0);
    ch.positions.push_back(pos);
    for (int i = 1; i <= k; ++i) {
        doc.times.push_back(static_cast<double>(i));
        pos += unit_step(eng);
        ch.positions.push_back(pos);
    }
    doc.channels.emplace_back("x", std::move(ch));
    return doc;
}

} // namespace snaptraj

#endif
