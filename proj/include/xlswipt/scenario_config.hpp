// SPDX-License-Identifier: Apache-2.0
//
// JSON scenario files. Keys carry their unit as a suffix (`p_et_mw`,
// `wavelength_m`, `sigma2_dbm`); everything is converted to SI watts and
// meters on load.

#ifndef XLSWIPT_SCENARIO_CONFIG_HPP
#define XLSWIPT_SCENARIO_CONFIG_HPP

#include <json.hpp>
#include <string>

#include "xlswipt/orchestrator.hpp"

namespace xlswipt {

/// Throws SchemaError naming the offending field path, e.g. "eh.zeta_max_mw".
Scenario parse_scenario(const nlohmann::json& doc);

/// Reads and parses a file. Unreadable files and malformed JSON are
/// reported as SchemaError with an empty or partial path.
Scenario load_scenario(const std::string& path);

/// The fully resolved scenario, in the same schema parse_scenario accepts.
nlohmann::json scenario_to_json(const Scenario& scenario);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

}  // namespace xlswipt

#endif  // XLSWIPT_SCENARIO_CONFIG_HPP
