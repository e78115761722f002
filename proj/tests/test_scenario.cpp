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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>

#include "procoop/game.hpp"
#include "procoop/scenario_gen.hpp"
#include "procoop/scenario_io.hpp"
#include "support.hpp"

using namespace procoop;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string profile_csv(const std::vector<std::pair<std::string, std::size_t>>& rows, std::size_t header_width) {
  std::ostringstream os;
  os << "id";
  for (std::size_t t = 1; t <= header_width; ++t) os << ",t" << t;
  os << '\n';
  for (const auto& [id, n] : rows) {
    os << id;
    for (std::size_t t = 0; t < n; ++t) os << ',' << 0.25 * static_cast<double>(t % 5);
    os << '\n';
  }
  return os.str();
}

std::string parse_error(const fs::path& prof, const fs::path& conf) {
  try {
    load_scenario_csv(prof, conf);
  } catch (const ScenarioParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("storage preset per-interval limits") {
  const StorageSpec st = storage_preset("home-7kwh");
  CHECK(st.capacity == 7.0);
  CHECK(st.charge_limit == doctest::Approx(1.75));
  CHECK(st.discharge_limit == doctest::Approx(-1.6));
  CHECK(st.eff_in == 0.95);
  CHECK(st.eff_out == 0.95);
  CHECK(st.soc0 == 0.5);
  CHECK(st.soc_min == 0.2);
  CHECK(st.soc_max == 0.95);
  CHECK_FALSE(storage_preset("none").is_active());
  CHECK_THROWS_AS(storage_preset("tesla"), std::invalid_argument);
}

TEST_CASE("tariff preset") {
  const TariffSchedule t = tariff_preset("economy7");
  REQUIRE(t.import_price.size() == 48);
  for (std::size_t i = 0; i < 48; ++i) {
    CHECK(t.import_price[i] == (i < 14 ? 0.072 : 0.1681));
    CHECK(t.export_price[i] == 0.0485);
    CHECK(t.import_price[i] > t.export_price[i]);
  }
  CHECK_THROWS_AS(tariff_preset("flat"), std::invalid_argument);
}

TEST_CASE("generated scenarios") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorConfig cfg;
    cfg.n_prosumers = 3 + seed % 9;
    cfg.seed = seed;
    const Scenario s = generate_scenario(cfg);
    CHECK(find_violations(s).empty());
    CHECK(s.horizon == 48);
    CHECK(s.interval_hours == 0.5);
    CHECK(s.size() == cfg.n_prosumers);
    for (const auto& p : s.prosumers) {
      if (p.has_storage()) CHECK(p.storage == storage_preset("home-7kwh"));
      // without PV the net load is pure consumption
      if (!p.has_pv) {
        for (double q : p.net_load) CHECK(q >= 0.0);
      }
    }
  }
}

TEST_CASE("no DER means no savings anywhere") {
  GeneratorConfig cfg;
  cfg.n_prosumers = 5;
  cfg.pv_fraction = 0.0;
  cfg.es_fraction = 0.0;
  const Scenario s = generate_scenario(cfg);
  const auto mix = der_mix(s);
  CHECK(mix.neither == 5);
  const GameBuild b = build_game(s, 20, 1);
  for (double v : b.game.values()) CHECK(v == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
}

TEST_CASE("adoption fractions at one") {
  GeneratorConfig cfg;
  cfg.n_prosumers = 7;
  cfg.pv_fraction = 1.0;
  cfg.es_fraction = 1.0;
  CHECK(der_mix(generate_scenario(cfg)).both == 7);
  cfg.pv_fraction = 1.5;
  CHECK_THROWS_AS(generate_scenario(cfg), std::invalid_argument);
  cfg.pv_fraction = 0.5;
  cfg.n_prosumers = 0;
  CHECK_THROWS_AS(generate_scenario(cfg), std::invalid_argument);
}

TEST_CASE("150 prosumers: census reproducible and roughly half adopt each technology") {
  GeneratorConfig cfg;
  cfg.n_prosumers = 150;
  cfg.seed = 42;
  const auto a = der_mix(generate_scenario(cfg));
  const auto b = der_mix(generate_scenario(cfg));
  CHECK(a.neither == b.neither);
  CHECK(a.pv_only == b.pv_only);
  CHECK(a.storage_only == b.storage_only);
  CHECK(a.both == b.both);
  CHECK(a.neither + a.pv_only + a.storage_only + a.both == 150);
  const std::size_t pv = a.pv_only + a.both;
  const std::size_t es = a.storage_only + a.both;
  // binomial(150, 0.5): five standard deviations is about 31
  CHECK(pv > 44);
  CHECK(pv < 106);
  CHECK(es > 44);
  CHECK(es < 106);
}

TEST_CASE("same config gives a byte-identical serialization") {
  GeneratorConfig cfg;
  cfg.n_prosumers = 12;
  cfg.seed = 9;
  const fs::path dir = support::temp_dir("scenario_determinism");
  write_scenario_csv(generate_scenario(cfg), dir / "a.csv", dir / "a.json");
  write_scenario_csv(generate_scenario(cfg), dir / "b.csv", dir / "b.json");
  CHECK(read_text(dir / "a.csv") == read_text(dir / "b.csv"));
  CHECK(read_text(dir / "a.json") == read_text(dir / "b.json"));
  cfg.seed = 10;
  write_scenario_csv(generate_scenario(cfg), dir / "c.csv", dir / "c.json");
  CHECK(read_text(dir / "a.csv") != read_text(dir / "c.csv"));
}

TEST_CASE("two-row profiles file with a preset tariff") {
  const fs::path dir = support::temp_dir("scenario_two_rows");
  write_text(dir / "p.csv", profile_csv({{"house-a", 48}, {"house-b", 48}}, 48));
  write_text(dir / "c.json", R"({"tariff": "economy7", "default_storage": "home-7kwh",
                                 "prosumers": {"house-b": {"storage": "none", "pv": true}}})");
  const Scenario s = load_scenario_csv(dir / "p.csv", dir / "c.json");
  REQUIRE(s.size() == 2);
  CHECK(s.horizon == 48);
  CHECK(s.prosumers[0].id == "house-a");
  CHECK(s.prosumers[0].storage == storage_preset("home-7kwh"));
  CHECK_FALSE(s.prosumers[1].has_storage());
  CHECK(s.prosumers[1].has_pv);
  CHECK(s.prosumers[1].net_load[3] == 0.75);
  CHECK(s.tariff.import_price[20] == 0.1681);
}

TEST_CASE("config variants") {
  const fs::path dir = support::temp_dir("scenario_config");
  write_text(dir / "p.csv", "id,t1,t2\nx,1.0,-0.5\ny,0.5,0.5\n");
  SUBCASE("explicit tariff and custom storage in kW") {
    write_text(dir / "c.json", R"({"interval_hours": 0.25,
      "tariff": {"import": [0.3, 0.2], "export": [0.1, 0.05]},
      "storage_presets": {"small": {"capacity_kwh": 2, "max_charge_kw": 4, "max_discharge_kw": 2,
                                    "eff_in": 0.9, "eff_out": 0.8, "soc0": 0.5, "soc_min": 0.1, "soc_max": 0.9}},
      "prosumers": {"y": {"storage": "small"}}})");
    const Scenario s = load_scenario_csv(dir / "p.csv", dir / "c.json");
    CHECK(s.interval_hours == 0.25);
    CHECK(s.tariff.import_price == std::vector<double>{0.3, 0.2});
    const StorageSpec& st = s.prosumers[1].storage;
    CHECK(st.capacity == 2.0);
    CHECK(st.charge_limit == doctest::Approx(1.0));
    CHECK(st.discharge_limit == doctest::Approx(-0.5));
    CHECK(st.eff_out == 0.8);
    CHECK_FALSE(s.prosumers[0].has_storage());
  }
  SUBCASE("energy limits given directly") {
    write_text(dir / "c.json", R"({"tariff": {"import": [0.3, 0.2], "export": [0.1, 0.05]},
      "default_storage": {"capacity_kwh": 3, "charge_limit_kwh": 0.7, "discharge_limit_kwh": -0.6,
                          "eff_in": 1, "eff_out": 1, "soc0": 0, "soc_min": 0, "soc_max": 1}})");
    const Scenario s = load_scenario_csv(dir / "p.csv", dir / "c.json");
    CHECK(s.prosumers[0].storage.charge_limit == 0.7);
    CHECK(s.prosumers[1].storage.discharge_limit == -0.6);
  }
  SUBCASE("config errors") {
    write_text(dir / "c.json", R"({"tariff": {"import": [0.3, 0.2]}})");
    CHECK(parse_error(dir / "p.csv", dir / "c.json").find("export") != std::string::npos);
    write_text(dir / "c.json", R"({"prosumers": {"z": {}}})");
    CHECK(parse_error(dir / "p.csv", dir / "c.json").find("prosumers.z") != std::string::npos);
    write_text(dir / "c.json", R"({"default_storage": "huge"})");
    CHECK(parse_error(dir / "p.csv", dir / "c.json").find("huge") != std::string::npos);
    write_text(dir / "c.json", R"({"default_storage": {"capacity_kwh": 3}})");
    CHECK(parse_error(dir / "p.csv", dir / "c.json").find("missing field") != std::string::npos);
    write_text(dir / "c.json", R"({"tariff": )");
    CHECK(!parse_error(dir / "p.csv", dir / "c.json").empty());
    CHECK(!parse_error(dir / "p.csv", dir / "missing.json").empty());
  }
  SUBCASE("tariff length mismatch is a validation failure") {
    write_text(dir / "c.json", R"({"tariff": {"import": [0.3], "export": [0.1]}})");
    CHECK_THROWS_AS(load_scenario_csv(dir / "p.csv", dir / "c.json"), InvalidScenario);
  }
}

TEST_CASE("profile errors name the offending row and line") {
  const fs::path dir = support::temp_dir("scenario_errors");
  write_text(dir / "c.json", "{}");
  SUBCASE("short row") {
    write_text(dir / "p.csv", profile_csv({{"ok", 48}, {"short-one", 47}}, 48));
    const std::string msg = parse_error(dir / "p.csv", dir / "c.json");
    CHECK(msg.find("short-one") != std::string::npos);
    CHECK(msg.find(":3:") != std::string::npos);
    CHECK(msg.find("47") != std::string::npos);
  }
  SUBCASE("non-numeric cell") {
    write_text(dir / "p.csv", "id,t1,t2\na,1,2\nb,1,x\n");
    const std::string msg = parse_error(dir / "p.csv", dir / "c.json");
    CHECK(msg.find(":3:") != std::string::npos);
    CHECK(msg.find("'x'") != std::string::npos);
  }
  SUBCASE("bad header") {
    write_text(dir / "p.csv", "name,t1\na,1\n");
    CHECK(parse_error(dir / "p.csv", dir / "c.json").find(":1:") != std::string::npos);
  }
  SUBCASE("empty file") {
    write_text(dir / "p.csv", "");
    CHECK(!parse_error(dir / "p.csv", dir / "c.json").empty());
  }
  SUBCASE("duplicate id is a validation failure") {
    write_text(dir / "p.csv", "id,t1\na,1\na,2\n");
    CHECK_THROWS_AS(load_scenario_csv(dir / "p.csv", dir / "c.json"), InvalidScenario);
  }
}

TEST_CASE("write then load reproduces the scenario") {
  GeneratorConfig cfg;
  cfg.n_prosumers = 9;
  cfg.seed = 5;
  const Scenario s = generate_scenario(cfg);
  const fs::path dir = support::temp_dir("scenario_round_trip");
  write_scenario_csv(s, dir / "p.csv", dir / "c.json");
  const Scenario r = load_scenario_csv(dir / "p.csv", dir / "c.json");
  REQUIRE(r.size() == s.size());
  CHECK(r.horizon == s.horizon);
  CHECK(r.interval_hours == s.interval_hours);
  for (std::size_t t = 0; t < s.horizon; ++t) {
    CHECK(r.tariff.import_price[t] == doctest::Approx(s.tariff.import_price[t]).epsilon(1e-9));
    CHECK(r.tariff.export_price[t] == doctest::Approx(s.tariff.export_price[t]).epsilon(1e-9));
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& a = s.prosumers[i];
    const auto& b = r.prosumers[i];
    CHECK(a.id == b.id);
    CHECK(a.has_pv == b.has_pv);
    CHECK(a.has_storage() == b.has_storage());
    for (std::size_t t = 0; t < s.horizon; ++t) CHECK(std::abs(a.net_load[t] - b.net_load[t]) <= 1e-9);
    CHECK(std::abs(a.storage.capacity - b.storage.capacity) <= 1e-9);
    CHECK(std::abs(a.storage.charge_limit - b.storage.charge_limit) <= 1e-9);
    CHECK(std::abs(a.storage.discharge_limit - b.storage.discharge_limit) <= 1e-9);
    CHECK(std::abs(a.storage.soc_max - b.storage.soc_max) <= 1e-9);
  }
}
