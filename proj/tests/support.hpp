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


#ifndef PROCOOP_TESTS_SUPPORT_HPP
#define PROCOOP_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "procoop/core.hpp"

namespace support {

inline procoop::Scenario scenario(const std::vector<std::vector<double>>& loads, std::vector<double> import_price,
                                  std::vector<double> export_price,
                                  const std::vector<procoop::StorageSpec>& storage = {}) {
  procoop::Scenario s;
  s.horizon = loads.empty() ? import_price.size() : loads.front().size();
  for (std::size_t i = 0; i < loads.size(); ++i) {
    procoop::Prosumer p;
    p.id = "p" + std::to_string(i + 1);
    p.net_load = loads[i];
    if (i < storage.size()) p.storage = storage[i];
    s.prosumers.push_back(std::move(p));
  }
  s.tariff.import_price = std::move(import_price);
  s.tariff.export_price = std::move(export_price);
  return s;
}

inline procoop::Scenario flat(const std::vector<std::vector<double>>& loads, double pb, double ps,
                              const std::vector<procoop::StorageSpec>& storage = {}) {
  const std::size_t R = loads.front().size();
  return scenario(loads, std::vector<double>(R, pb), std::vector<double>(R, ps), storage);
}

inline procoop::StorageSpec battery(double e, double charge, double discharge, double eta, double soc0,
                                    double soc_min = 0.0, double soc_max = 1.0) {
  procoop::StorageSpec st;
  st.capacity = e;
  st.charge_limit = charge;
  st.discharge_limit = discharge;
  st.eff_in = eta;
  st.eff_out = eta;
  st.soc0 = soc0;
  st.soc_min = soc_min;
  st.soc_max = soc_max;
  return st;
}

// Small dispatch instance whose battery parameters sit on the oracle's
// 0.01 * capacity lattice. At most two members; loads are mostly positive so
// that costs are well away from zero.
inline procoop::Scenario random_dp_instance(std::uint64_t seed, std::size_t& members) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const std::size_t R = static_cast<std::size_t>(pick(2, 6));
  members = static_cast<std::size_t>(pick(1, 2));
  std::vector<std::vector<double>> loads(members, std::vector<double>(R));
  for (auto& row : loads) {
    for (double& q : row) q = -1.0 + 4.0 * u(rng);
  }
  std::vector<double> pb(R), ps(R);
  for (std::size_t t = 0; t < R; ++t) {
    pb[t] = 0.05 + 0.25 * u(rng);
    ps[t] = pb[t] * 0.8 * u(rng);
  }
  const double etas[] = {1.0, 0.95, 0.9};
  std::vector<procoop::StorageSpec> st(members);
  for (auto& b : st) {
    if (u(rng) < 0.2) continue;
    const double e = 0.5 + 1.5 * u(rng);
    const double eta = etas[pick(0, 2)];
    const int lo = pick(0, 2) * 10;
    const int hi = 100 - pick(0, 3) * 10;
    const int steps_in = pick(5, 15);
    const int steps_out = pick(5, 15);
    b.capacity = e;
    b.eff_in = eta;
    b.eff_out = eta;
    b.soc_min = lo / 100.0;
    b.soc_max = hi / 100.0;
    b.soc0 = pick(lo, hi) / 100.0;
    // Stored-energy step limits land exactly on the lattice.
    b.charge_limit = steps_in * e / 100.0 / eta;
    b.discharge_limit = -steps_out * e / 100.0 * eta;
  }
  return scenario(loads, pb, ps, st);
}

inline std::filesystem::path temp_dir(const std::string& name) {
  std::filesystem::path p = std::filesystem::path(PROCOOP_TEST_TMP) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace support

#endif  // PROCOOP_TESTS_SUPPORT_HPP
