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


/// \file procoop/bench.hpp
///
/// Experiment orchestration behind the command-line tool: the exhaustive
/// prosumer game, the full-vs-clustered comparison, DER census per cluster,
/// and the CSV/text artifacts the tool writes.

#ifndef PROCOOP_BENCH_HPP
#define PROCOOP_BENCH_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "procoop/clustered_game.hpp"
#include "procoop/core.hpp"
#include "procoop/game.hpp"

namespace procoop {

struct FullOptions {
  std::size_t cap = 20;
  std::size_t workers = 0;
  DispatchOptions dispatch;
  NucleolusOptions nucleolus;
};

struct FullResult {
  GameBuild build;
  NucleolusResult nucleolus;
  StabilityReport stability;
  /// sum(u) - v(N)
  double efficiency_gap = 0.0;
  double game_seconds = 0.0;
  double nucleolus_seconds = 0.0;

  std::size_t dispatch_lp_solves() const { return build.lp_solves; }
  std::size_t total_lp_solves() const { return build.lp_solves + nucleolus.lp_solves; }
};

/// Exhaustive prosumer game plus its nucleolus. Throws CapExceeded for N > cap.
FullResult run_full(const Scenario& s, const FullOptions& opts);

struct ClusterCensus {
  std::size_t prosumers = 0;
  std::size_t pv = 0;
  std::size_t storage = 0;
};

std::vector<ClusterCensus> der_census(const Scenario& s, std::span<const std::size_t> assignment, std::size_t k);

/// Fraction of prosumers whose (PV, storage) type equals the most common type
/// of their cluster.
double der_purity(const Scenario& s, std::span<const std::size_t> assignment, std::size_t k);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

struct DeviationStats {
  double rms = 0.0;
  double max_abs = 0.0;
  double mean_abs_reference = 0.0;
  /// rms / mean_abs_reference
  double rms_relative = 0.0;
  double spearman = 0.0;
};

DeviationStats deviation_stats(std::span<const double> reference, std::span<const double> estimate);

struct ComparisonReport {
  std::vector<std::string> ids;
  std::vector<double> full;
  std::vector<double> clustered;
  DeviationStats stats;
  FullResult full_model;
  PipelineResult clustered_model;
};

/// Runs the full model and the clustered pipeline on the same scenario with
/// independent cost evaluators.
ComparisonReport run_compare(const Scenario& s, const PipelineOptions& pipeline, const FullOptions& full);

// --- artifacts -----------------------------------------------------------

struct PayoffRecord {
  std::string id;
  double payoff = 0.0;
  double standalone_cost = 0.0;
};

struct ClusterRecord {
  std::string id;
  /// 1-based cluster label.
  std::size_t cluster = 0;
  bool has_pv = false;
  bool has_storage = false;
};

struct ComparisonRecord {
  std::string id;
  double full = 0.0;
  double clustered = 0.0;
  double difference = 0.0;
  std::size_t cluster = 0;
};

void write_payoffs_csv(const std::filesystem::path& path, const Scenario& s, std::span<const double> payoffs,
                       std::span<const double> standalone_costs);
std::vector<PayoffRecord> read_payoffs_csv(const std::filesystem::path& path);

void write_clusters_csv(const std::filesystem::path& path, const Scenario& s, std::span<const std::size_t> assignment);
std::vector<ClusterRecord> read_clusters_csv(const std::filesystem::path& path);

void write_comparison_csv(const std::filesystem::path& path, const ComparisonReport& report);
std::vector<ComparisonRecord> read_comparison_csv(const std::filesystem::path& path);

void write_game_values(const std::filesystem::path& path, const CoalitionGame& game);
CoalitionGame read_game_values(const std::filesystem::path& path);

/// Provenance echoed into report.txt so that a run can be replayed.
struct RunInfo {
  std::string source;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
};

std::string format_full_report(const Scenario& s, const FullResult& r, const RunInfo& info);
std::string format_clustered_report(const Scenario& s, const PipelineResult& r, const PipelineOptions& opts,
                                    const RunInfo& info);
std::string format_comparison_report(const Scenario& s, const ComparisonReport& r, const PipelineOptions& opts,
                                     const RunInfo& info);

}  // namespace procoop

#endif  // PROCOOP_BENCH_HPP
