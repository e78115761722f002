// Copyright 2026 The procoop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/// \file procoop/scenario_io.hpp
///
/// File-based scenarios.
///
/// Profiles CSV: header `id,t1,...,tR`, then one row per prosumer with R
/// net-load values in kWh per interval.
///
/// Scenario config (JSON):
///
///     {
///       "interval_hours": 0.5,
///       "tariff": "economy7"  |  {"import": [...], "export": [...]},
///       "storage_presets": {"name": {<storage>}, ...},
///       "default_storage": "none" | "<preset>" | {<storage>},
///       "prosumers": {"<id>": {"storage": ..., "pv": true}, ...}
///     }
///
/// A <storage> object holds `capacity_kwh`, either `charge_limit_kwh` or
/// `max_charge_kw`, either `discharge_limit_kwh` (<= 0) or
/// `max_discharge_kw` (> 0), and `eff_in`, `eff_out`, `soc0`, `soc_min`,
/// `soc_max`. Power ratings are converted to energy per interval. The
/// built-in preset `home-7kwh` is always available.

#ifndef PROCOOP_SCENARIO_IO_HPP
#define PROCOOP_SCENARIO_IO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "procoop/core.hpp"

namespace procoop {

class ScenarioParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProfileRow {
  std::string id;
  std::vector<double> values;
};

/// Reads a profiles CSV; errors name the offending line.
std::vector<ProfileRow> read_profiles_csv(const std::filesystem::path& path);

/// Loads and validates a scenario. Throws ScenarioParseError or InvalidScenario.
Scenario load_scenario_csv(const std::filesystem::path& profiles_path, const std::filesystem::path& config_path);

/// Writes `s` so that load_scenario_csv reproduces it exactly.
void write_scenario_csv(const Scenario& s, const std::filesystem::path& profiles_path,
                        const std::filesystem::path& config_path);

}  // namespace procoop

#endif  // PROCOOP_SCENARIO_IO_HPP
