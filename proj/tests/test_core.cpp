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

#include <algorithm>
#include <string>

#include "procoop/core.hpp"
#include "support.hpp"

using namespace procoop;

namespace {

Scenario valid48() {
  std::vector<std::vector<double>> loads(3, std::vector<double>(48, 0.5));
  return support::flat(loads, 0.1681, 0.0485);
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("valid scenario is accepted unchanged") {
  const Scenario s = valid48();
  CHECK(find_violations(s).empty());
  CHECK(&validate_scenario(s) == &s);
  // idempotent
  CHECK_NOTHROW(validate_scenario(validate_scenario(s)));
}

TEST_CASE("short profile names the prosumer and the expected length") {
  Scenario s = valid48();
  s.prosumers[1].net_load.pop_back();
  const auto v = find_violations(s);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("'p2'") != std::string::npos);
  CHECK(v[0].find("47") != std::string::npos);
  CHECK(v[0].find("expected 48") != std::string::npos);
  CHECK_THROWS_AS(validate_scenario(s), InvalidScenario);
}

TEST_CASE("tariff inversion names the interval") {
  Scenario s = support::flat({{1, 1, 1, 1}}, 0.1, 0.05);
  s.tariff.export_price[2] = 0.2;
  const auto v = find_violations(s);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("t=3") != std::string::npos);
}

TEST_CASE("every violation is reported, not only the first") {
  Scenario s = valid48();
  s.prosumers[0].net_load.resize(47);
  s.prosumers[2].storage = support::battery(7, 1.75, -1.6, 0.95, 0.1, 0.2, 0.95);
  s.tariff.export_price[5] = 1.0;
  s.prosumers[1].id = "p1";
  try {
    validate_scenario(s);
    FAIL("expected InvalidScenario");
  } catch (const InvalidScenario& e) {
    const auto& v = e.violations();
    CHECK(v.size() == 4);
    CHECK(mentions(v, "net load has 47 values"));
    CHECK(mentions(v, "state-of-charge bounds inconsistent"));
    CHECK(mentions(v, "t=6"));
    CHECK(mentions(v, "duplicate prosumer id 'p1'"));
    CHECK(std::string(e.what()).find("4 violations") != std::string::npos);
  }
}

TEST_CASE("storage and horizon invariants") {
  Scenario s = valid48();
  s.prosumers[0].storage = support::battery(7, -1.0, 0.5, 1.2, 0.5);
  const auto v = find_violations(s);
  CHECK(mentions(v, "charge limit"));
  CHECK(mentions(v, "discharge limit"));
  CHECK(mentions(v, "charge efficiency"));

  Scenario empty_horizon = valid48();
  empty_horizon.horizon = 0;
  CHECK(mentions(find_violations(empty_horizon), "horizon"));

  Scenario bad_dt = valid48();
  bad_dt.interval_hours = 0.0;
  CHECK(mentions(find_violations(bad_dt), "interval length"));

  Scenario nan_load = valid48();
  nan_load.prosumers[0].net_load[3] = std::nan("");
  CHECK(mentions(find_violations(nan_load), "non-finite net load at t=4"));

  Scenario negative_export = valid48();
  negative_export.tariff.export_price[0] = -0.01;
  CHECK(mentions(find_violations(negative_export), "negative export price at t=1"));
}

TEST_CASE("zero-capacity storage is the no-storage representation") {
  CHECK_FALSE(StorageSpec::none().is_active());
  Prosumer p;
  CHECK_FALSE(p.has_storage());
  p.storage = support::battery(1, 1, -1, 1, 0.5);
  CHECK(p.has_storage());
}

TEST_CASE("coalition mask round trip for every mask up to 20 players") {
  for (std::size_t n : {0u, 1u, 5u, 13u, 20u}) {
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t m = 0; m < count; ++m) {
      const Coalition c = Coalition::from_mask(n, m);
      const auto members = c.members();
      const Coalition back = Coalition::from_members(n, members);
      if (back.to_mask() != m || back.size() != members.size()) {
        FAIL("round trip failed for n=" << n << " mask=" << m);
      }
    }
  }
}

TEST_CASE("coalition operations beyond one machine word") {
  Coalition a(150), b(150);
  a.insert(3);
  a.insert(149);
  b.insert(64);
  CHECK(a.size() == 2);
  CHECK(a.disjoint(b));
  const Coalition u = a | b;
  CHECK(u.members() == std::vector<std::size_t>{3, 64, 149});
  CHECK(Coalition::grand(150).size() == 150);
  CHECK_FALSE(u.contains(200));
  CHECK_THROWS_AS(a.insert(150), std::out_of_range);
  CHECK_THROWS(a.to_mask());
  CHECK_THROWS_AS(Coalition::from_mask(3, 8), std::out_of_range);
  CHECK(Coalition(10).empty());
  CoalitionHash h;
  CHECK(h(Coalition::from_mask(10, 5)) == h(Coalition::from_mask(10, 5)));
  a.erase(3);
  CHECK(a.members() == std::vector<std::size_t>{149});
}
