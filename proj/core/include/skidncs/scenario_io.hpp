#pragma once

#include <stdexcept>
#include <string>

#include "skidncs/simulator.hpp"

namespace skidncs {

/// Scenario file rejected: missing key, unknown key, wrong type, or a
/// violated invariant. `key` names the offending field (dotted path).
class ScenarioParseError : public std::runtime_error {
public:
    ScenarioParseError(std::string key_path, const std::string& what)
        : std::runtime_error("scenario key '" + key_path + "': " + what),
          key(std::move(key_path)) {}

    std::string key;
};

/// Parse a scenario from JSON text. Every field is required; unknown keys
/// are rejected.
Scenario parse_scenario(const std::string& json_text);

/// Load a scenario from a JSON file. Throws ScenarioParseError on schema
/// violations and std::runtime_error if the file cannot be read.
Scenario load_scenario(const std::string& path);

/// Serialize with a fixed key order, so parse -> serialize is stable.
std::string scenario_to_json(const Scenario& sc);

/// Fixed-header CSV with 17 significant digits, suitable as a regression
/// oracle: identical scenarios serialize byte-identically.
std::string trace_to_csv(const SimTrace& trace);

void write_trace_csv(const SimTrace& trace, const std::string& path);

}  // namespace skidncs
