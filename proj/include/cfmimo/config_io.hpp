#pragma once

#include <map>
#include <string>

#include "cfmimo/experiment.hpp"

namespace cfmimo {

/// Flat `key = value` file with '#' comments. Unknown keys are hard errors so
/// misspelled physics parameters cannot silently default.
std::map<std::string, std::string> parse_kv_file(const std::string& path);

/// Environment overrides: CFMIMO_<KEY-IN-UPPER-CASE> replaces/creates the key.
void apply_env_overrides(std::map<std::string, std::string>& kv);

/// Builds a spec from parsed keys (after env overrides). Validates key names
/// and value syntax; spec-level consistency is checked by validate(spec).
ExperimentSpec spec_from_kv(const std::map<std::string, std::string>& kv);

/// The documented key list (lower_snake_case, mirroring the config structs).
const std::map<std::string, std::string>& known_config_keys();

}  // namespace cfmimo
