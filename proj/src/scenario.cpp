#include "adl/scenario.hpp"

#include <cmath>
#include <set>

#include "adl/errors.hpp"

namespace adl {

namespace {

using nlohmann::json;

struct PresetSpec {
    const char* name;
    double delta, p;
    LimitMode mode;
    double horizon;
};

constexpr PresetSpec kPresets[] = {
    {"example-2.1", 0.9, 0.23, LimitMode::standard, 100.0},
    {"example-3.1", 1.51, 0.21, LimitMode::standard, 100.0},
    {"example-3.2", 1.51, 0.22, LimitMode::standard, 100.0},
    {"example-3.3", 1.51, 0.23, LimitMode::standard, 100.0},
    {"example-3.4", 1.51, 0.234, LimitMode::standard, 100.0},
    {"example-3.5", 1.51, 0.24, LimitMode::standard, 100.0},
    {"example-3.6", 1.85, 0.248, LimitMode::extended, 100.0},
    {"example-3.7", 1.92, 0.248, LimitMode::extended, 100.0},
};

std::string location(std::string_view text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

void reject_unknown(const json& object, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (const auto& [key, value] : object.items()) {
        (void)value;
        if (!allowed.count(key)) throw ConfigError(where + key + ": unknown key");
    }
}

double number(const json& value, const std::string& field) {
    if (!value.is_number()) throw ConfigError(field + ": expected a number");
    return value.get<double>();
}

bool boolean(const json& value, const std::string& field) {
    if (!value.is_boolean()) throw ConfigError(field + ": expected true or false");
    return value.get<bool>();
}

std::string text_field(const json& value, const std::string& field) {
    if (!value.is_string()) throw ConfigError(field + ": expected a string");
    return value.get<std::string>();
}

int integer(const json& value, const std::string& field) {
    if (!value.is_number_integer()) throw ConfigError(field + ": expected an integer");
    return value.get<int>();
}

LimitMode parse_mode(const std::string& text) {
    if (text == "standard") return LimitMode::standard;
    if (text == "extended") return LimitMode::extended;
    throw ConfigError("mode: expected \"standard\" or \"extended\"");
}

}  // namespace

void Scenario::validate() const {
    params.validate();
    if (!std::isfinite(horizon) || !(horizon > 0.0)) throw ConfigError("horizon: must be > 0");
    if (K.empty()) throw ConfigError("K: at least one value");
    for (double k : K) {
        if (!std::isfinite(k) || k < 2.0 || k > 1e18 || std::floor(k) != k) {
            throw ConfigError("K: integers in [2, 1e18]");
        }
    }
    if (seeds.empty()) throw ConfigError("seeds: at least one value");
    if (replicates < 1) throw ConfigError("replicates: must be >= 1");
    if (points < 2) throw ConfigError("points: must be >= 2");
    if (out.empty()) throw ConfigError("out: empty path");
}

Scenario preset(std::string_view name) {
    for (const auto& spec : kPresets) {
        if (name != spec.name) continue;
        Scenario s;
        s.name = spec.name;
        s.params.delta = spec.delta;
        s.params.p = spec.p;
        s.params.C = 1.0;
        s.params.tau = 1.3;
        s.params.kappa = 0.0;
        s.params.sigma = 1.0;
        s.params.alpha = 0.5;
        s.mode = spec.mode;
        s.horizon = spec.horizon;
        return s;
    }
    throw ConfigError("preset: unknown name \"" + std::string(name) + "\"");
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& spec : kPresets) out.emplace_back(spec.name);
    return out;
}

Scenario parse_config(std::string_view text) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        throw ConfigError("missing params");
    }
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("parse error at " + location(text, e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("document: expected an object");
    reject_unknown(doc,
                   {"name", "preset", "params", "mode", "clamp", "with_mutation", "horizon", "K",
                    "seeds", "replicates", "points", "out", "svg"},
                   "");

    Scenario s;
    if (doc.contains("preset")) {
        s = preset(text_field(doc["preset"], "preset"));
    } else if (!doc.contains("params")) {
        throw ConfigError("missing params");
    }
    if (doc.contains("params")) {
        const json& p = doc["params"];
        if (!p.is_object()) throw ConfigError("params: expected an object");
        reject_unknown(p, {"delta", "C", "p", "tau", "kappa", "sigma", "alpha"}, "params.");
        if (!doc.contains("preset")) {
            for (const char* key : {"delta", "p", "tau"}) {
                if (!p.contains(key)) throw ConfigError(std::string("params.") + key + ": missing");
            }
        }
        auto set = [&](const char* key, double& field) {
            if (p.contains(key)) field = number(p[key], std::string("params.") + key);
        };
        set("delta", s.params.delta);
        set("C", s.params.C);
        set("p", s.params.p);
        set("tau", s.params.tau);
        set("kappa", s.params.kappa);
        set("sigma", s.params.sigma);
        set("alpha", s.params.alpha);
    }
    if (doc.contains("name")) s.name = text_field(doc["name"], "name");
    if (doc.contains("mode")) s.mode = parse_mode(text_field(doc["mode"], "mode"));
    if (doc.contains("clamp")) s.clamp = boolean(doc["clamp"], "clamp");
    if (doc.contains("with_mutation")) s.with_mutation = boolean(doc["with_mutation"], "with_mutation");
    if (doc.contains("horizon")) s.horizon = number(doc["horizon"], "horizon");
    if (doc.contains("K")) {
        const json& ks = doc["K"];
        if (!ks.is_array()) throw ConfigError("K: expected an array");
        s.K.clear();
        for (const auto& k : ks) s.K.push_back(number(k, "K"));
    }
    if (doc.contains("seeds")) {
        const json& seeds = doc["seeds"];
        if (!seeds.is_array()) throw ConfigError("seeds: expected an array");
        s.seeds.clear();
        for (const auto& seed : seeds) {
            if (!seed.is_number_unsigned()) throw ConfigError("seeds: expected unsigned integers");
            s.seeds.push_back(seed.get<std::uint64_t>());
        }
    }
    if (doc.contains("replicates")) s.replicates = integer(doc["replicates"], "replicates");
    if (doc.contains("points")) s.points = integer(doc["points"], "points");
    if (doc.contains("out")) s.out = text_field(doc["out"], "out");
    if (doc.contains("svg")) s.svg = boolean(doc["svg"], "svg");
    s.validate();
    return s;
}

nlohmann::json to_json(const Scenario& s) {
    json params = {{"delta", s.params.delta}, {"C", s.params.C},         {"p", s.params.p},
                   {"tau", s.params.tau},     {"kappa", s.params.kappa}, {"sigma", s.params.sigma},
                   {"alpha", s.params.alpha}};
    return {{"name", s.name},
            {"params", params},
            {"mode", to_string(s.mode)},
            {"clamp", s.clamp},
            {"with_mutation", s.with_mutation},
            {"horizon", s.horizon},
            {"K", s.K},
            {"seeds", s.seeds},
            {"replicates", s.replicates},
            {"points", s.points},
            {"out", s.out},
            {"svg", s.svg}};
}

}  // namespace adl
