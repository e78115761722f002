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

/// \file procoop/core.hpp
///
/// Domain vocabulary shared by every stage: prosumers, their storage, the
/// tariff, the scenario that bundles them, and coalitions of prosumers.
///
/// All energy quantities are kWh per interval. Prices are currency per kWh.

#ifndef PROCOOP_CORE_HPP
#define PROCOOP_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace procoop {

/// Battery parameters of one prosumer.
///
/// Limits are energies per interval: `charge_limit >= 0` and
/// `discharge_limit <= 0`. State-of-charge values are fractions of
/// `capacity`. A prosumer without a battery carries `StorageSpec::none()`.
struct StorageSpec {
  double capacity = 0.0;
  double charge_limit = 0.0;
  double discharge_limit = 0.0;
  double eff_in = 1.0;
  double eff_out = 1.0;
  double soc0 = 0.0;
  double soc_min = 0.0;
  double soc_max = 1.0;

  static StorageSpec none() { return {}; }

  /// True when the battery can actually shift energy between intervals.
  bool is_active() const { return capacity > 0.0 && (charge_limit > 0.0 || discharge_limit < 0.0); }

  bool operator==(const StorageSpec&) const = default;
};

struct Prosumer {
  std::string id;
  /// Net consumption per interval without storage; negative means export.
  std::vector<double> net_load;
  StorageSpec storage;
  /// Metadata only (PV is already folded into net_load); used for DER census.
  bool has_pv = false;

  bool has_storage() const { return storage.is_active(); }
};

struct TariffSchedule {
  std::vector<double> import_price;
  std::vector<double> export_price;
};

struct Scenario {
  std::vector<Prosumer> prosumers;
  TariffSchedule tariff;
  std::size_t horizon = 0;
  double interval_hours = 0.5;

  std::size_t size() const { return prosumers.size(); }
};

/// A set of prosumer indices drawn from a universe of `universe()` players.
///
/// Stored as a dynamic bitmask so that scenarios with hundreds of prosumers
/// (the clustered pipeline) use the same type as small exhaustive games.
class Coalition {
 public:
  Coalition() = default;
  explicit Coalition(std::size_t universe);

  static Coalition grand(std::size_t universe);
  static Coalition from_members(std::size_t universe, std::span<const std::size_t> members);
  /// Requires `universe <= 64`.
  static Coalition from_mask(std::size_t universe, std::uint64_t mask);

  /// Requires `universe() <= 64`.
  std::uint64_t to_mask() const;

  std::size_t universe() const { return universe_; }
  bool contains(std::size_t i) const;
  void insert(std::size_t i);
  void erase(std::size_t i);

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::vector<std::size_t> members() const;

  bool disjoint(const Coalition& other) const;
  Coalition operator|(const Coalition& other) const;
  bool operator==(const Coalition&) const = default;

  std::size_t hash() const;

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

struct CoalitionHash {
  std::size_t operator()(const Coalition& c) const { return c.hash(); }
};

/// Raised by `validate_scenario`; carries every violation found, not just the first.
class InvalidScenario : public std::runtime_error {
 public:
  explicit InvalidScenario(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Lists every broken invariant of `s`. Interval indices in messages are 1-based.
std::vector<std::string> find_violations(const Scenario& s);

/// Returns `s` unchanged when it is consistent, otherwise throws InvalidScenario.
const Scenario& validate_scenario(const Scenario& s);

}  // namespace procoop

#endif  // PROCOOP_CORE_HPP
