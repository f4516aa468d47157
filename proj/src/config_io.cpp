#include "rideq/config_io.hpp"

#include "rideq/errors.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace rideq {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const auto& k : allowed)
            known = known || it.key() == k;
        if (!known)
            throw ValidationError(path + "." + it.key() + ": unknown key");
    }
}

double require_number(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key))
        throw ValidationError(path + "." + key + ": missing");
    const auto& v = obj.at(key);
    if (!v.is_number())
        throw ValidationError(path + "." + key + ": must be a number");
    return v.get<double>();
}

} // namespace

MarketConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!root.is_object())
        throw ValidationError("config: top level must be an object");
    reject_unknown_keys(root, {"demand", "matching", "beta", "c", "T", "tau", "platforms"},
                        "config");

    if (!root.contains("demand") || !root.at("demand").is_object())
        throw ValidationError("config.demand: missing or not an object");
    const json& d = root.at("demand");
    reject_unknown_keys(d, {"type", "q_bar", "alpha"}, "config.demand");
    if (!d.contains("type") || !d.at("type").is_string() ||
        d.at("type").get<std::string>() != "exponential")
        throw ValidationError("config.demand.type: must be \"exponential\"");
    double q_bar = require_number(d, "q_bar", "config.demand");
    double alpha = require_number(d, "alpha", "config.demand");

    if (!root.contains("matching") || !root.at("matching").is_object())
        throw ValidationError("config.matching: missing or not an object");
    const json& mm = root.at("matching");
    reject_unknown_keys(mm, {"A", "kappa"}, "config.matching");
    double a = require_number(mm, "A", "config.matching");
    double kappa = require_number(mm, "kappa", "config.matching");

    double beta = require_number(root, "beta", "config");
    double c = require_number(root, "c", "config");
    double trip_time = require_number(root, "T", "config");
    double tau = 0.0;
    if (root.contains("tau")) {
        if (!root.at("tau").is_number())
            throw ValidationError("config.tau: must be a number");
        tau = root.at("tau").get<double>();
    }

    if (!root.contains("platforms") || !root.at("platforms").is_array())
        throw ValidationError("config.platforms: missing or not an array");
    std::vector<PlatformFleet> platforms;
    std::size_t idx = 0;
    for (const auto& p : root.at("platforms")) {
        std::string path = "config.platforms[" + std::to_string(idx) + "]";
        if (!p.is_object())
            throw ValidationError(path + ": must be an object");
        reject_unknown_keys(p, {"fleet", "fare"}, path);
        PlatformFleet pf;
        pf.fleet = require_number(p, "fleet", path);
        if (p.contains("fare") && !p.at("fare").is_null()) {
            if (!p.at("fare").is_number())
                throw ValidationError(path + ".fare: must be a number or null");
            pf.fare = p.at("fare").get<double>();
        }
        platforms.push_back(pf);
        ++idx;
    }

    try {
        MarketConfig cfg{ExponentialDemand(q_bar, alpha), MatchingModel(a, kappa),
                         beta,  c, trip_time, tau, std::move(platforms)};
        cfg.validate();
        return cfg;
    } catch (const DomainError& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
}

MarketConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_hash(const MarketConfig& config) {
    // FNV-1a over a canonical full-precision rendering of every parameter.
    std::string canon;
    char cell[64];
    auto push = [&](double v) {
        std::snprintf(cell, sizeof cell, "%.17g;", v);
        canon += cell;
    };
    push(config.demand.potential());
    push(config.demand.alpha());
    push(config.matching.A);
    push(config.matching.kappa);
    push(config.beta);
    push(config.c);
    push(config.T);
    push(config.tau);
    for (const auto& p : config.platforms) {
        push(p.fleet);
        push(p.fare ? *p.fare : -1.0);
        canon += p.fare ? "f;" : "n;";
    }
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::snprintf(cell, sizeof cell, "%016" PRIx64, h);
    return cell;
}

} // namespace rideq
