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


/// \file procoop/clustered_game.hpp
///
/// The scalable pipeline: optimize the grand coalition, cluster the
/// resulting per-prosumer net loads, play the game between clusters (each
/// cluster keeps its members' original loads and batteries), then hand each
/// cluster's payoff down to its members in proportion to their absolute
/// stand-alone costs.

#ifndef PROCOOP_CLUSTERED_GAME_HPP
#define PROCOOP_CLUSTERED_GAME_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "procoop/clustering.hpp"
#include "procoop/core.hpp"
#include "procoop/cost_evaluator.hpp"
#include "procoop/dispatch.hpp"
#include "procoop/game.hpp"

namespace procoop {

/// A partition of a scenario's prosumers into k nonempty clusters.
class ClusteredScenario {
 public:
  /// `base` must outlive this object. `assignment[i]` is in [0, k).
  ClusteredScenario(const Scenario& base, std::vector<std::size_t> assignment, std::size_t k);

  const Scenario& base() const { return *base_; }
  std::size_t k() const { return k_; }
  const std::vector<std::size_t>& assignment() const { return assignment_; }
  const std::vector<std::size_t>& members(std::size_t cluster) const { return members_[cluster]; }

  /// Union of the member prosumers of the clusters in `clusters`.
  Coalition prosumers_of(Mask clusters) const;

 private:
  const Scenario* base_;
  std::size_t k_;
  std::vector<std::size_t> assignment_;
  std::vector<std::vector<std::size_t>> members_;
};

DispatchSolution grand_dispatch(CostEvaluator& eval);

/// l*_it = q_it + b*_it, one row per prosumer.
ProfileMatrix post_dispatch_profiles(const Scenario& s, const DispatchSolution& grand);

struct ClusteredGameBuild {
  CoalitionGame game;
  /// C(union of clusters in mask) per cluster mask.
  std::vector<double> costs;
  /// Cluster coalitions whose prosumer set had already been solved.
  std::size_t reused = 0;
  std::size_t lp_solves = 0;
};

/// v(U) = sum of members' C({i}) - C(union of U), for all 2^k cluster masks.
ClusteredGameBuild build_clustered_game(const ClusteredScenario& cs, CostEvaluator& eval, std::size_t cap = 20);

enum class DeclusterMode { paper_literal, efficiency_preserving };

std::string to_string(DeclusterMode m);
DeclusterMode parse_decluster_mode(const std::string& s);

struct DeclusterResult {
  PayoffAllocation allocation;
  /// Amount handed to each cluster before the in-cluster split.
  std::vector<double> cluster_amounts;
  /// Clusters whose members all had zero stand-alone cost (split equally).
  std::vector<std::size_t> equal_split_clusters;
};

/// Distributes the cluster payoffs `u_cl` to prosumers. In paper-literal mode
/// cluster j hands out u_j + v({cl_j}); in efficiency-preserving mode it hands
/// out u_j. Shares within a cluster are |C({i})| / sum over the cluster.
DeclusterResult decluster_payoffs(std::span<const double> u_cl, const CoalitionGame& game_cl,
                                  std::span<const double> singleton_costs, const ClusteredScenario& cs,
                                  DeclusterMode mode);

struct PipelineOptions {
  std::size_t k = 8;
  SelectionOptions selection;
  DeclusterMode mode = DeclusterMode::efficiency_preserving;
  std::size_t cap = 20;
  std::size_t workers = 0;
  DispatchOptions dispatch;
  NucleolusOptions nucleolus;
};

struct StageTimes {
  double grand_dispatch_s = 0.0;
  double singletons_s = 0.0;
  double clustering_s = 0.0;
  double clustered_game_s = 0.0;
  double nucleolus_s = 0.0;
  double decluster_s = 0.0;
};

struct PipelineResult {
  DispatchSolution grand;
  ProfileMatrix profiles;
  ClusteringSelection selection;
  ClusteredGameBuild clustered;
  NucleolusResult cluster_nucleolus;
  /// v({cl_j}) per cluster.
  std::vector<double> cluster_singleton_values;
  /// C({i}) per prosumer.
  std::vector<double> singleton_costs;
  DeclusterMode mode = DeclusterMode::efficiency_preserving;
  DeclusterResult payoffs;
  /// Totals distributed under each mode.
  double total_paper_literal = 0.0;
  double total_efficiency_preserving = 0.0;

  /// Dispatch programs actually solved (instrumented).
  std::size_t dispatch_lp_solves = 0;
  /// Dispatch solves reused from the memo (coinciding prosumer sets).
  std::size_t dispatch_reused = 0;
  std::size_t nucleolus_lp_solves = 0;
  StageTimes times;

  /// 1 + N + (2^k - 1) - reused.
  std::size_t expected_dispatch_lp_solves() const;
  std::size_t total_lp_solves() const { return dispatch_lp_solves + nucleolus_lp_solves; }
};

/// Raised with the name of the failing stage.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(const std::string& stage, const std::string& what);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

PipelineResult run_pipeline(const Scenario& s, const PipelineOptions& opts);

}  // namespace procoop

#endif  // PROCOOP_CLUSTERED_GAME_HPP
