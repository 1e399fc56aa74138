#pragma once
// Sectioned key/value scenario files: one [section] per scenario, flat keys.
// Unknown keys, duplicate names and invariant violations all fail the load
// with the offending key named.
#include <cstdint>
#include <string>
#include <vector>

#include "qmsn/protocols.hpp"

namespace qmsn {

enum class ScenarioKind : std::uint8_t { protocol, figure2 };

struct ScenarioSpec {
  std::string name;
  ScenarioKind kind = ScenarioKind::protocol;
  ProtocolConfig base;
  std::string qsdc_message;               // optional explicit payload
  std::vector<std::string> bob_secrets;   // optional explicit qss secrets
  std::uint64_t trials = 1;
  std::uint64_t seed = 1;
  std::string output_path;  // empty: derived from the scenario name
};

/// Parse and fully validate a scenario file.
std::vector<ScenarioSpec> load_config(const std::string& path);

/// Same, from an in-memory buffer (used by tests and error reporting).
std::vector<ScenarioSpec> parse_config(const std::string& text,
                                       const std::string& origin);

}  // namespace qmsn
