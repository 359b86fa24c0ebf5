#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "adl/limit_process.hpp"
#include "adl/model.hpp"

namespace adl {

struct Scenario {
    std::string name = "custom";
    ModelParams params;
    LimitMode mode = LimitMode::standard;
    bool clamp = false;          // mean field: snap densities below 1/K to zero
    bool with_mutation = true;   // mean field: mutation inflow terms
    double horizon = 100.0;      // log K time units
    std::vector<double> K{1e5};
    std::vector<std::uint64_t> seeds{1};
    int replicates = 1;
    int points = 1001;           // output samples per trajectory
    std::string out = "out";
    bool svg = false;

    // Throws ConfigError naming the field.
    void validate() const;
};

// Presets "example-2.1" and "example-3.1" ... "example-3.7". Throws ConfigError on an
// unknown name.
Scenario preset(std::string_view name);
std::vector<std::string> preset_names();

// Strict JSON scenario document:
//   {"name": .., "preset": .., "params": {"delta", "C", "p", "tau", "kappa", "sigma",
//    "alpha"}, "mode": "standard"|"extended", "clamp", "with_mutation", "horizon",
//    "K": [..], "seeds": [..], "replicates", "points", "out", "svg"}
// "params" may be omitted only when "preset" is given; keys present in "params" then
// override the preset. Unknown keys, syntax errors (with line and column) and invariant
// violations throw ConfigError.
Scenario parse_config(std::string_view text);

// The document parse_config reads back into an identical Scenario.
nlohmann::json to_json(const Scenario& scenario);

}  // namespace adl
