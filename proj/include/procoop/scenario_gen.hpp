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


/// \file procoop/scenario_gen.hpp
///
/// Synthetic one-day scenarios at half-hour resolution: household demand
/// with morning and evening peaks, clear-day PV on a random half of the
/// homes, a home battery on an independent random half, a two-rate import
/// tariff and a flat export tariff.
///
/// Demand and PV magnitudes are calibration knobs, not measured data.

#ifndef PROCOOP_SCENARIO_GEN_HPP
#define PROCOOP_SCENARIO_GEN_HPP

#include <cstddef>
#include <cstdint>
#include <string>

#include "procoop/core.hpp"

namespace procoop {

inline constexpr std::size_t kDayIntervals = 48;
inline constexpr double kHalfHour = 0.5;

/// Per-interval household consumption (kWh) built from a base load plus two
/// Gaussian bumps. Centers and widths are in intervals.
struct LoadShape {
  double base_min = 0.10;
  double base_max = 0.20;
  double morning_min = 0.15;
  double morning_max = 0.45;
  double morning_center = 15.0;
  double morning_width = 2.5;
  double evening_min = 0.35;
  double evening_max = 0.85;
  double evening_center = 37.0;
  double evening_width = 3.5;
  /// Relative standard deviation of the per-interval multiplicative noise.
  double noise = 0.10;
};

/// Clear-day PV output: a sin^2 bell between sunrise and sunset intervals.
struct PvShape {
  double peak_kw_min = 2.6;
  double peak_kw_max = 3.2;
  double sunrise = 10.0;
  double sunset = 42.0;
  double noise = 0.03;
};

struct GeneratorConfig {
  std::size_t n_prosumers = 10;
  std::uint64_t seed = 1;
  double pv_fraction = 0.5;
  double es_fraction = 0.5;
  LoadShape load;
  PvShape pv;
  std::string tariff_preset = "economy7";
  std::string storage_preset = "home-7kwh";
};

/// Two-rate import price (0.072 before 07:00, 0.1681 after) and a flat
/// 0.0485 export price, per interval of `interval_hours`.
TariffSchedule tariff_preset(const std::string& name, std::size_t horizon = kDayIntervals,
                             double interval_hours = kHalfHour);

/// 7 kWh battery, 3.5 kW charge, 3.2 kW discharge, 95% efficiency each way,
/// half full at the start, usable between 20% and 95%. Power ratings are
/// converted to energy per interval.
StorageSpec storage_preset(const std::string& name, double interval_hours = kHalfHour);

/// Deterministic in `cfg.seed`; always passes validate_scenario.
Scenario generate_scenario(const GeneratorConfig& cfg);

struct DerMixCount {
  std::size_t neither = 0;
  std::size_t pv_only = 0;
  std::size_t storage_only = 0;
  std::size_t both = 0;
};

DerMixCount der_mix(const Scenario& s);

}  // namespace procoop

#endif  // PROCOOP_SCENARIO_GEN_HPP
