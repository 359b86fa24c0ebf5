#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "adl/scenario.hpp"

namespace adl {

inline constexpr const char* kVersion = "1.0.0";

// Parses argv (without the program name) and runs one subcommand. Returns 0 on success,
// 1 on a runtime or configuration error (a JSON error record goes to `err`), 2 on a usage
// error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Runs `command` with a validated scenario and command-specific arguments, writing into
// scenario.out. Returns the manifest, which is also written next to the outputs.
// The manifest holds everything needed to rerun: command, args and scenario.
nlohmann::json execute(const std::string& command, const Scenario& scenario,
                       const nlohmann::json& args, std::ostream& out);

// Reruns a manifest, optionally into a different output directory.
nlohmann::json replay(const nlohmann::json& manifest, const std::string& out_dir,
                      std::ostream& out);

}  // namespace adl
