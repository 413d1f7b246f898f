#pragma once

// Flat key-value text format shared by scenario and inventory files:
//
//   # comment
//   key = value
//
// Keys are lower_snake_case; unknown keys are rejected with the line number.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mpsim/model.hpp"

namespace mpsim {

struct KeyValueEntry {
  std::string value;
  int line = 0;
};

/// Parses the key-value format. Throws ConfigError naming the offending line
/// on malformed input or duplicate keys.
std::map<std::string, KeyValueEntry> parse_key_values(const std::string& text);

std::string read_text_file(const std::string& path);

/// Parses a scenario; fields not present keep their defaults.
ClusterScenario parse_scenario(const std::string& text);
ClusterScenario load_scenario_file(const std::string& path);

/// Applies one `key = value` pair to a scenario (used for file keys and for
/// command-line overrides).
void apply_scenario_key(ClusterScenario& scenario, const std::string& key, const std::string& value);

/// Canonical text form listing every key; parse_scenario(format_scenario(s)) == s.
std::string format_scenario(const ClusterScenario& scenario);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string scenario_hash(const ClusterScenario& scenario);

std::vector<std::string> split(const std::string& text, char sep);
std::string trim(const std::string& text);
double parse_double(const std::string& text, const std::string& what);
std::int64_t parse_int(const std::string& text, const std::string& what);

}  // namespace mpsim
