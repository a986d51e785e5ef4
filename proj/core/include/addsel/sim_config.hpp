#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "addsel/simulation.hpp"

namespace addsel {

/// Parses the flat `key = value` experiment format. `#` starts a comment;
/// section keys are dotted (`noise.family`). Unknown keys, duplicate keys and
/// bad values raise InputError naming the key. The result is validated.
SimConfig parse_sim_config(std::string_view text);

/// Resolved configuration (auto values filled in) as JSON.
nlohmann::ordered_json config_to_json(const SimConfig& config);

/// One row per method: method, penalty, replications, rates, mean size,
/// mean estimation error, unconverged count.
std::string report_csv(const SelectionReport& report);

nlohmann::ordered_json report_json(const SelectionReport& report);

}  // namespace addsel
