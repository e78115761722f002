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


#include "procoop/clustered_game.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace procoop {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Coalition> singleton_coalitions(std::size_t n) {
  std::vector<Coalition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Coalition c(n);
    c.insert(i);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

ClusteredScenario::ClusteredScenario(const Scenario& base, std::vector<std::size_t> assignment, std::size_t k)
    : base_(&base), k_(k), assignment_(std::move(assignment)), members_(k) {
  if (assignment_.size() != base.size()) throw std::invalid_argument("ClusteredScenario: assignment does not cover all prosumers");
  if (k_ > kMaxPlayers) throw std::invalid_argument("ClusteredScenario: too many clusters");
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    if (assignment_[i] >= k_) throw std::invalid_argument("ClusteredScenario: cluster index out of range");
    members_[assignment_[i]].push_back(i);
  }
  for (std::size_t j = 0; j < k_; ++j) {
    if (members_[j].empty()) throw std::invalid_argument("ClusteredScenario: cluster " + std::to_string(j) + " is empty");
  }
}

Coalition ClusteredScenario::prosumers_of(Mask clusters) const {
  Coalition c(base_->size());
  for (std::size_t j = 0; j < k_; ++j) {
    if (!(clusters >> j & 1u)) continue;
    for (std::size_t i : members_[j]) c.insert(i);
  }
  return c;
}

DispatchSolution grand_dispatch(CostEvaluator& eval) {
  return eval.solve(Coalition::grand(eval.scenario().size()));
}

ProfileMatrix post_dispatch_profiles(const Scenario& s, const DispatchSolution& grand) {
  if (grand.members.size() != s.size() || grand.schedule.size() != s.size()) {
    throw std::invalid_argument("post_dispatch_profiles: schedule does not cover every prosumer");
  }
  ProfileMatrix m(s.size(), s.horizon);
  for (std::size_t pos = 0; pos < grand.members.size(); ++pos) {
    const std::size_t i = grand.members[pos];
    if (grand.schedule[pos].size() != s.horizon) throw std::invalid_argument("post_dispatch_profiles: schedule length mismatch");
    for (std::size_t t = 0; t < s.horizon; ++t) m(i, t) = s.prosumers[i].net_load[t] + grand.schedule[pos][t];
  }
  return m;
}

ClusteredGameBuild build_clustered_game(const ClusteredScenario& cs, CostEvaluator& eval, std::size_t cap) {
  const std::size_t k = cs.k();
  if (k > cap || k > kMaxPlayers) throw CapExceeded(k, std::min(cap, kMaxPlayers));
  const Scenario& s = cs.base();
  const std::size_t before = eval.lp_solves();

  const std::vector<double> singles = eval.costs(singleton_coalitions(s.size()));

  const std::size_t count = std::size_t{1} << k;
  std::vector<Coalition> unions;
  unions.reserve(count - 1);
  ClusteredGameBuild out;
  for (std::size_t m = 1; m < count; ++m) {
    unions.push_back(cs.prosumers_of(static_cast<Mask>(m)));
    if (eval.cached(unions.back())) ++out.reused;
  }
  const std::vector<double> solved = eval.costs(unions);

  out.costs.assign(count, 0.0);
  std::vector<double> values(count, 0.0);
  for (std::size_t m = 1; m < count; ++m) {
    out.costs[m] = solved[m - 1];
    double standalone = 0.0;
    for (std::size_t i : unions[m - 1].members()) standalone += singles[i];
    values[m] = standalone - out.costs[m];
  }
  std::vector<double> standalone(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i : cs.members(j)) standalone[j] += singles[i];
  }
  out.game = CoalitionGame(k, std::move(values), std::move(standalone));
  out.lp_solves = eval.lp_solves() - before;
  return out;
}

std::string to_string(DeclusterMode m) {
  return m == DeclusterMode::paper_literal ? "paper-literal" : "efficiency-preserving";
}

DeclusterMode parse_decluster_mode(const std::string& s) {
  if (s == "paper-literal") return DeclusterMode::paper_literal;
  if (s == "efficiency-preserving") return DeclusterMode::efficiency_preserving;
  throw std::invalid_argument("unknown de-clustering mode '" + s + "' (expected paper-literal or efficiency-preserving)");
}

DeclusterResult decluster_payoffs(std::span<const double> u_cl, const CoalitionGame& game_cl,
                                  std::span<const double> singleton_costs, const ClusteredScenario& cs,
                                  DeclusterMode mode) {
  const std::size_t k = cs.k();
  if (u_cl.size() != k || game_cl.players() != k) throw std::invalid_argument("decluster_payoffs: cluster count mismatch");
  if (singleton_costs.size() != cs.base().size()) throw std::invalid_argument("decluster_payoffs: cost count mismatch");

  DeclusterResult out;
  out.allocation.provenance = Provenance::declustered;
  out.allocation.x.assign(cs.base().size(), 0.0);
  out.cluster_amounts.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    double amount = u_cl[j];
    if (mode == DeclusterMode::paper_literal) amount += game_cl.value(Mask{1} << j);
    out.cluster_amounts[j] = amount;

    const auto& members = cs.members(j);
    double base = 0.0;
    for (std::size_t i : members) base += std::abs(singleton_costs[i]);
    if (base > 0.0) {
      for (std::size_t i : members) out.allocation.x[i] = amount * std::abs(singleton_costs[i]) / base;
    } else {
      out.equal_split_clusters.push_back(j);
      for (std::size_t i : members) out.allocation.x[i] = amount / static_cast<double>(members.size());
    }
  }
  return out;
}

std::size_t PipelineResult::expected_dispatch_lp_solves() const {
  const std::size_t n = singleton_costs.size();
  const std::size_t k = selection.chosen.k;
  return 1 + n + ((std::size_t{1} << k) - 1) - dispatch_reused;
}

PipelineError::PipelineError(const std::string& stage, const std::string& what)
    : std::runtime_error(stage + ": " + what), stage_(stage) {}

PipelineResult run_pipeline(const Scenario& s, const PipelineOptions& opts) {
  try {
    validate_scenario(s);
  } catch (const InvalidScenario& e) {
    throw PipelineError("validation", e.what());
  }
  const std::size_t n = s.size();
  if (opts.k < 1 || opts.k > n) {
    throw PipelineError("clustering", "k=" + std::to_string(opts.k) + " must lie in [1, " + std::to_string(n) + "]");
  }
  if (opts.k > opts.cap || opts.k > kMaxPlayers) {
    throw PipelineError("clustered game", CapExceeded(opts.k, std::min(opts.cap, kMaxPlayers)).what());
  }

  PipelineResult out;
  out.mode = opts.mode;
  CostEvaluator eval(s, opts.dispatch, opts.workers);

  auto t0 = std::chrono::steady_clock::now();
  try {
    out.grand = grand_dispatch(eval);
  } catch (const std::exception& e) {
    throw PipelineError("grand dispatch", e.what());
  }
  out.times.grand_dispatch_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const std::size_t hits_before = eval.memo_hits();
  try {
    out.singleton_costs = eval.costs(singleton_coalitions(n));
  } catch (const std::exception& e) {
    throw PipelineError("stand-alone costs", e.what());
  }
  const std::size_t singles_reused = eval.memo_hits() - hits_before;
  out.times.singletons_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  try {
    out.profiles = post_dispatch_profiles(s, out.grand);
    SelectionOptions sel = opts.selection;
    if (sel.workers == 0) sel.workers = opts.workers;
    out.selection = select_clustering(out.profiles, opts.k, sel);
  } catch (const std::exception& e) {
    throw PipelineError("clustering", e.what());
  }
  out.times.clustering_s = seconds_since(t0);

  const ClusteredScenario cs(s, out.selection.chosen.assignment, opts.k);
  t0 = std::chrono::steady_clock::now();
  try {
    out.clustered = build_clustered_game(cs, eval, opts.cap);
  } catch (const std::exception& e) {
    throw PipelineError("clustered game", e.what());
  }
  out.times.clustered_game_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  try {
    out.cluster_nucleolus = nucleolus(out.clustered.game, opts.nucleolus);
  } catch (const std::exception& e) {
    throw PipelineError("cluster nucleolus", e.what());
  }
  out.times.nucleolus_s = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto& u = out.cluster_nucleolus.allocation.x;
  out.cluster_singleton_values.resize(opts.k);
  for (std::size_t j = 0; j < opts.k; ++j) out.cluster_singleton_values[j] = out.clustered.game.value(Mask{1} << j);
  const auto literal = decluster_payoffs(u, out.clustered.game, out.singleton_costs, cs, DeclusterMode::paper_literal);
  const auto preserving =
      decluster_payoffs(u, out.clustered.game, out.singleton_costs, cs, DeclusterMode::efficiency_preserving);
  for (double x : literal.allocation.x) out.total_paper_literal += x;
  for (double x : preserving.allocation.x) out.total_efficiency_preserving += x;
  out.payoffs = opts.mode == DeclusterMode::paper_literal ? literal : preserving;
  out.times.decluster_s = seconds_since(t0);

  out.dispatch_lp_solves = eval.lp_solves();
  out.dispatch_reused = singles_reused + out.clustered.reused;
  out.nucleolus_lp_solves = out.cluster_nucleolus.lp_solves;
  return out;
}

}  // namespace procoop
