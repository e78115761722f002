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


#include "procoop/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "procoop/scenario_gen.hpp"

namespace procoop {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double number_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ScenarioParseError(where + ": missing field '" + key + "'");
  if (!obj[key].is_number()) throw ScenarioParseError(where + ": field '" + key + "' must be a number");
  return obj[key].get<double>();
}

StorageSpec parse_storage(const json& j, double dt, const std::map<std::string, StorageSpec>& presets,
                          const std::string& where) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (auto it = presets.find(name); it != presets.end()) return it->second;
    try {
      return storage_preset(name, dt);
    } catch (const std::invalid_argument&) {
      throw ScenarioParseError(where + ": unknown storage preset '" + name + "'");
    }
  }
  if (!j.is_object()) throw ScenarioParseError(where + ": storage must be a preset name or an object");
  StorageSpec st;
  st.capacity = number_field(j, "capacity_kwh", where);
  if (j.contains("charge_limit_kwh")) {
    st.charge_limit = number_field(j, "charge_limit_kwh", where);
  } else {
    st.charge_limit = number_field(j, "max_charge_kw", where) * dt;
  }
  if (j.contains("discharge_limit_kwh")) {
    st.discharge_limit = number_field(j, "discharge_limit_kwh", where);
  } else {
    st.discharge_limit = -number_field(j, "max_discharge_kw", where) * dt;
  }
  st.eff_in = number_field(j, "eff_in", where);
  st.eff_out = number_field(j, "eff_out", where);
  st.soc0 = number_field(j, "soc0", where);
  st.soc_min = number_field(j, "soc_min", where);
  st.soc_max = number_field(j, "soc_max", where);
  return st;
}

json storage_to_json(const StorageSpec& st) {
  return json{{"capacity_kwh", st.capacity}, {"charge_limit_kwh", st.charge_limit},
              {"discharge_limit_kwh", st.discharge_limit}, {"eff_in", st.eff_in},
              {"eff_out", st.eff_out}, {"soc0", st.soc0}, {"soc_min", st.soc_min}, {"soc_max", st.soc_max}};
}

std::vector<double> number_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ScenarioParseError(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ScenarioParseError(where + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::vector<ProfileRow> read_profiles_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioParseError("cannot open profiles file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  std::vector<ProfileRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (width == 0) {
      if (cells.size() < 2 || trim(cells[0]) != "id") {
        throw ScenarioParseError(path.string() + ":" + std::to_string(line_no) + ": expected header 'id,t1,...,tR'");
      }
      width = cells.size() - 1;
      continue;
    }
    ProfileRow row;
    row.id = trim(cells[0]);
    if (cells.size() - 1 != width) {
      throw ScenarioParseError(path.string() + ":" + std::to_string(line_no) + ": row '" + row.id + "' has " +
                               std::to_string(cells.size() - 1) + " values, expected " + std::to_string(width));
    }
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const std::string cell = trim(cells[c]);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v)) {
        throw ScenarioParseError(path.string() + ":" + std::to_string(line_no) + ": column " + std::to_string(c + 1) +
                                 ": '" + cell + "' is not a finite number");
      }
      row.values.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (width == 0) throw ScenarioParseError(path.string() + ": empty profiles file");
  return rows;
}

Scenario load_scenario_csv(const std::filesystem::path& profiles_path, const std::filesystem::path& config_path) {
  const auto rows = read_profiles_csv(profiles_path);

  std::ifstream in(config_path);
  if (!in) throw ScenarioParseError("cannot open config file " + config_path.string());
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioParseError(config_path.string() + ": " + e.what());
  }
  if (!cfg.is_object()) throw ScenarioParseError(config_path.string() + ": top level must be an object");

  Scenario s;
  s.horizon = rows.empty() ? 0 : rows.front().values.size();
  s.interval_hours = cfg.contains("interval_hours") ? number_field(cfg, "interval_hours", "config") : kHalfHour;

  const json tariff = cfg.value("tariff", json("economy7"));
  if (tariff.is_string()) {
    try {
      s.tariff = tariff_preset(tariff.get<std::string>(), s.horizon, s.interval_hours);
    } catch (const std::invalid_argument& e) {
      throw ScenarioParseError(std::string("config: ") + e.what());
    }
  } else if (tariff.is_object()) {
    if (!tariff.contains("import") || !tariff.contains("export")) {
      throw ScenarioParseError("config: tariff object needs 'import' and 'export' arrays");
    }
    s.tariff.import_price = number_array(tariff["import"], "config: tariff.import");
    s.tariff.export_price = number_array(tariff["export"], "config: tariff.export");
  } else {
    throw ScenarioParseError("config: tariff must be a preset name or an object");
  }

  std::map<std::string, StorageSpec> presets;
  if (cfg.contains("storage_presets")) {
    if (!cfg["storage_presets"].is_object()) throw ScenarioParseError("config: storage_presets must be an object");
    for (const auto& [name, spec] : cfg["storage_presets"].items()) {
      presets[name] = parse_storage(spec, s.interval_hours, presets, "config: storage_presets." + name);
    }
  }
  const StorageSpec fallback = parse_storage(cfg.value("default_storage", json("none")), s.interval_hours, presets,
                                             "config: default_storage");

  const json per = cfg.value("prosumers", json::object());
  if (!per.is_object()) throw ScenarioParseError("config: prosumers must be an object keyed by id");
  for (const auto& [id, _] : per.items()) {
    const bool known = std::any_of(rows.begin(), rows.end(), [&](const ProfileRow& r) { return r.id == id; });
    if (!known) throw ScenarioParseError("config: prosumers." + id + " does not match any profile row");
  }

  for (const ProfileRow& r : rows) {
    Prosumer p;
    p.id = r.id;
    p.net_load = r.values;
    p.storage = fallback;
    if (per.contains(r.id)) {
      const json& entry = per[r.id];
      const std::string where = "config: prosumers." + r.id;
      if (!entry.is_object()) throw ScenarioParseError(where + " must be an object");
      if (entry.contains("storage")) p.storage = parse_storage(entry["storage"], s.interval_hours, presets, where);
      if (entry.contains("pv")) {
        if (!entry["pv"].is_boolean()) throw ScenarioParseError(where + ".pv must be true or false");
        p.has_pv = entry["pv"].get<bool>();
      }
    }
    s.prosumers.push_back(std::move(p));
  }
  validate_scenario(s);
  return s;
}

void write_scenario_csv(const Scenario& s, const std::filesystem::path& profiles_path,
                        const std::filesystem::path& config_path) {
  std::ofstream prof(profiles_path);
  if (!prof) throw std::runtime_error("cannot write " + profiles_path.string());
  prof << "id";
  for (std::size_t t = 1; t <= s.horizon; ++t) prof << ",t" << t;
  prof << '\n';
  for (const Prosumer& p : s.prosumers) {
    prof << p.id;
    for (double v : p.net_load) prof << ',' << format_double(v);
    prof << '\n';
  }

  json cfg;
  cfg["interval_hours"] = s.interval_hours;
  cfg["tariff"] = json{{"import", s.tariff.import_price}, {"export", s.tariff.export_price}};
  cfg["default_storage"] = "none";
  json per = json::object();
  for (const Prosumer& p : s.prosumers) {
    per[p.id] = json{{"storage", p.storage == StorageSpec::none() ? json("none") : storage_to_json(p.storage)},
                     {"pv", p.has_pv}};
  }
  cfg["prosumers"] = per;
  std::ofstream conf(config_path);
  if (!conf) throw std::runtime_error("cannot write " + config_path.string());
  conf << cfg.dump(2) << '\n';
}

}  // namespace procoop
