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


#include "procoop/scenario_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

namespace procoop {

namespace {

double bump(double t, double center, double width) {
  const double z = (t - center) / width;
  return std::exp(-0.5 * z * z);
}

}  // namespace

TariffSchedule tariff_preset(const std::string& name, std::size_t horizon, double interval_hours) {
  if (name != "economy7") throw std::invalid_argument("unknown tariff preset '" + name + "'");
  TariffSchedule t;
  t.import_price.resize(horizon);
  t.export_price.assign(horizon, 0.0485);
  for (std::size_t r = 0; r < horizon; ++r) {
    const double hour = std::fmod(static_cast<double>(r) * interval_hours, 24.0);
    t.import_price[r] = hour < 7.0 ? 0.072 : 0.1681;
  }
  return t;
}

StorageSpec storage_preset(const std::string& name, double interval_hours) {
  if (name == "none") return StorageSpec::none();
  if (name != "home-7kwh") throw std::invalid_argument("unknown storage preset '" + name + "'");
  StorageSpec st;
  st.capacity = 7.0;
  st.charge_limit = 3.5 * interval_hours;
  st.discharge_limit = -3.2 * interval_hours;
  st.eff_in = 0.95;
  st.eff_out = 0.95;
  st.soc0 = 0.5;
  st.soc_min = 0.20;
  st.soc_max = 0.95;
  return st;
}

Scenario generate_scenario(const GeneratorConfig& cfg) {
  if (cfg.n_prosumers < 1) throw std::invalid_argument("generator: need at least one prosumer");
  if (!(cfg.pv_fraction >= 0.0 && cfg.pv_fraction <= 1.0) || !(cfg.es_fraction >= 0.0 && cfg.es_fraction <= 1.0)) {
    throw std::invalid_argument("generator: adoption fractions must lie in [0, 1]");
  }

  Scenario s;
  s.horizon = kDayIntervals;
  s.interval_hours = kHalfHour;
  s.tariff = tariff_preset(cfg.tariff_preset, s.horizon, s.interval_hours);
  const StorageSpec battery = storage_preset(cfg.storage_preset, s.interval_hours);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  const LoadShape& ls = cfg.load;
  const PvShape& ps = cfg.pv;
  for (std::size_t i = 0; i < cfg.n_prosumers; ++i) {
    Prosumer p;
    char id[16];
    std::snprintf(id, sizeof id, "p%03zu", i + 1);
    p.id = id;
    // Adoption draws come first so the DER mix does not depend on shape knobs.
    p.has_pv = unit(rng) < cfg.pv_fraction;
    const bool es = unit(rng) < cfg.es_fraction;
    p.storage = es ? battery : StorageSpec::none();

    const double base = between(ls.base_min, ls.base_max);
    const double morning = between(ls.morning_min, ls.morning_max);
    const double evening = between(ls.evening_min, ls.evening_max);
    const double shift_m = between(-1.5, 1.5);
    const double shift_e = between(-2.0, 2.0);
    const double pv_peak = between(ps.peak_kw_min, ps.peak_kw_max) * s.interval_hours;

    p.net_load.resize(s.horizon);
    for (std::size_t t = 0; t < s.horizon; ++t) {
      const double tc = static_cast<double>(t) + 0.5;
      double demand = base + morning * bump(tc, ls.morning_center + shift_m, ls.morning_width) +
                      evening * bump(tc, ls.evening_center + shift_e, ls.evening_width);
      demand *= std::max(0.0, 1.0 + ls.noise * gauss(rng));
      double pv = 0.0;
      const double noise = gauss(rng);
      if (p.has_pv && tc > ps.sunrise && tc < ps.sunset) {
        const double phase = std::sin(std::numbers::pi * (tc - ps.sunrise) / (ps.sunset - ps.sunrise));
        pv = std::max(0.0, pv_peak * phase * phase * (1.0 + ps.noise * noise));
      }
      p.net_load[t] = demand - pv;
    }
    s.prosumers.push_back(std::move(p));
  }
  return s;
}

DerMixCount der_mix(const Scenario& s) {
  DerMixCount c;
  for (const Prosumer& p : s.prosumers) {
    const bool es = p.has_storage();
    if (p.has_pv && es) {
      ++c.both;
    } else if (p.has_pv) {
      ++c.pv_only;
    } else if (es) {
      ++c.storage_only;
    } else {
      ++c.neither;
    }
  }
  return c;
}

}  // namespace procoop
