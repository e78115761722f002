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

#include "procoop/dispatch.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <tuple>

namespace procoop {

namespace {

// Builds the program for an arbitrary list of battery units sharing one
// aggregated net load. Unit u owns variables 2(uR+t) and 2(uR+t)+1.
lp::Problem build_units(const std::vector<StorageSpec>& units, const std::vector<double>& load,
                        const TariffSchedule& tariff, std::size_t R, RowCensus* census) {
  lp::Problem p;
  const std::size_t U = units.size();
  for (std::size_t u = 0; u < U; ++u) {
    const StorageSpec& st = units[u];
    const bool usable = st.capacity > 0.0;
    for (std::size_t t = 0; t < R; ++t) {
      p.add_variable(0.0, usable ? st.charge_limit : 0.0);
      p.add_variable(0.0, usable ? -st.discharge_limit : 0.0);
    }
  }
  for (std::size_t t = 0; t < R; ++t) {
    p.add_variable(0.0, lp::kInf, tariff.import_price[t]);
    p.add_variable(0.0, lp::kInf, -tariff.export_price[t]);
  }
  const std::size_t grid0 = 2 * U * R;

  // Balance: sum_u (c - d) - g+ + g- = -load
  for (std::size_t t = 0; t < R; ++t) {
    std::vector<lp::Term> terms;
    terms.reserve(2 * U + 2);
    for (std::size_t u = 0; u < U; ++u) {
      terms.push_back({2 * (u * R + t), 1.0});
      terms.push_back({2 * (u * R + t) + 1, -1.0});
    }
    terms.push_back({grid0 + 2 * t, -1.0});
    terms.push_back({grid0 + 2 * t + 1, 1.0});
    p.add_row(std::move(terms), lp::Sense::equal, -load[t]);
  }

  for (std::size_t u = 0; u < U; ++u) {
    const StorageSpec& st = units[u];
    const double lo = (st.soc_min - st.soc0) * st.capacity;
    const double hi = (st.soc_max - st.soc0) * st.capacity;
    std::vector<lp::Term> prefix;
    prefix.reserve(2 * R);
    for (std::size_t k = 0; k < R; ++k) {
      prefix.push_back({2 * (u * R + k), st.eff_in});
      prefix.push_back({2 * (u * R + k) + 1, -1.0 / st.eff_out});
      p.add_row(prefix, lo, hi);
    }
    p.add_row(std::move(prefix), lp::Sense::equal, 0.0);
  }

  if (census != nullptr) {
    census->balance = R;
    census->bound = 4 * U * R;
    census->energy = 2 * U * R;
    census->cycle = U;
  }
  return p;
}

std::vector<double> coalition_load(const Scenario& s, const std::vector<std::size_t>& members) {
  std::vector<double> load(s.horizon, 0.0);
  for (std::size_t i : members) {
    const auto& q = s.prosumers[i].net_load;
    for (std::size_t t = 0; t < s.horizon; ++t) load[t] += q[t];
  }
  return load;
}

// Batteries whose parameters coincide once limits are expressed per unit of
// capacity can be pooled without changing the optimum.
using MergeKey = std::tuple<double, double, double, double, double, double, double>;

MergeKey merge_key(const StorageSpec& st) {
  return {st.eff_in,  st.eff_out, st.soc0, st.soc_min, st.soc_max, st.charge_limit / st.capacity,
          st.discharge_limit / st.capacity};
}

}  // namespace

DispatchError::DispatchError(lp::Status status)
    : std::runtime_error("dispatch program not solved: " + std::string(lp::to_string(status))), status_(status) {}

DispatchLP build_dispatch_lp(const Coalition& coalition, const Scenario& s) {
  DispatchLP out;
  out.members = coalition.members();
  out.horizon = s.horizon;
  std::vector<StorageSpec> units;
  units.reserve(out.members.size());
  for (std::size_t i : out.members) units.push_back(s.prosumers[i].storage);
  out.problem = build_units(units, coalition_load(s, out.members), s.tariff, s.horizon, &out.census);
  return out;
}

DispatchSolution coalition_cost(const Coalition& coalition, const Scenario& s, const DispatchOptions& opts) {
  const std::size_t R = s.horizon;
  DispatchSolution sol;
  sol.members = coalition.members();
  const std::size_t M = sol.members.size();
  sol.schedule.assign(M, std::vector<double>(R, 0.0));

  // unit u -> (member positions, weights)
  std::vector<StorageSpec> units;
  std::vector<std::vector<std::pair<std::size_t, double>>> shares;
  if (opts.merge_identical_storage) {
    std::map<MergeKey, std::size_t> unit_of;
    for (std::size_t pos = 0; pos < M; ++pos) {
      const StorageSpec& st = s.prosumers[sol.members[pos]].storage;
      if (!st.is_active()) continue;
      auto [it, fresh] = unit_of.try_emplace(merge_key(st), units.size());
      if (fresh) {
        units.push_back(st);
        units.back().capacity = 0.0;
        units.back().charge_limit = 0.0;
        units.back().discharge_limit = 0.0;
        shares.emplace_back();
      }
      StorageSpec& agg = units[it->second];
      agg.capacity += st.capacity;
      agg.charge_limit += st.charge_limit;
      agg.discharge_limit += st.discharge_limit;
      shares[it->second].push_back({pos, st.capacity});
    }
    for (std::size_t u = 0; u < units.size(); ++u) {
      for (auto& [pos, w] : shares[u]) w /= units[u].capacity;
    }
  } else {
    for (std::size_t pos = 0; pos < M; ++pos) {
      units.push_back(s.prosumers[sol.members[pos]].storage);
      shares.push_back({{pos, 1.0}});
    }
  }

  const lp::Problem prob = build_units(units, coalition_load(s, sol.members), s.tariff, R, nullptr);
  const lp::Solution lps = lp::solve(prob, opts.lp);
  if (lps.status != lp::Status::optimal) throw DispatchError(lps.status);

  sol.cost = lps.objective;
  const std::size_t grid0 = 2 * units.size() * R;
  sol.imports.resize(R);
  sol.exports.resize(R);
  for (std::size_t t = 0; t < R; ++t) {
    sol.imports[t] = lps.x[grid0 + 2 * t];
    sol.exports[t] = lps.x[grid0 + 2 * t + 1];
  }
  for (std::size_t u = 0; u < units.size(); ++u) {
    for (std::size_t t = 0; t < R; ++t) {
      const double b = lps.x[2 * (u * R + t)] - lps.x[2 * (u * R + t) + 1];
      for (const auto& [pos, w] : shares[u]) sol.schedule[pos][t] = w * b;
    }
  }
  return sol;
}

double individual_cost(std::size_t i, const Scenario& s, const DispatchOptions& opts) {
  Coalition c(s.size());
  c.insert(i);
  return coalition_cost(c, s, opts).cost;
}

double evaluate_cost(const Scenario& s, const Coalition& coalition, const std::vector<std::vector<double>>& schedule) {
  const auto members = coalition.members();
  double cost = 0.0;
  for (std::size_t t = 0; t < s.horizon; ++t) {
    double net = 0.0;
    for (std::size_t pos = 0; pos < members.size(); ++pos) {
      net += s.prosumers[members[pos]].net_load[t] + schedule[pos][t];
    }
    cost += net > 0.0 ? s.tariff.import_price[t] * net : s.tariff.export_price[t] * net;
  }
  return cost;
}

}  // namespace procoop
