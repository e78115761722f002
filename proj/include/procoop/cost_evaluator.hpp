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


/// \file procoop/cost_evaluator.hpp
///
/// Memoized, instrumented access to coalition costs. Every dispatch program
/// solved through an evaluator is counted, which is how LP-count claims
/// about the full and clustered models are checked.

#ifndef PROCOOP_COST_EVALUATOR_HPP
#define PROCOOP_COST_EVALUATOR_HPP

#include <atomic>
#include <cstddef>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "procoop/core.hpp"
#include "procoop/dispatch.hpp"

namespace procoop {

class CostEvaluator {
 public:
  /// `s` must outlive the evaluator. `workers == 0` means all hardware threads.
  explicit CostEvaluator(const Scenario& s, DispatchOptions opts = {}, std::size_t workers = 0);

  const Scenario& scenario() const { return *scenario_; }
  std::size_t workers() const { return workers_; }

  /// C(S); solved at most once per distinct coalition. C(empty) = 0 without a solve.
  double cost(const Coalition& c);

  /// Batch form of cost(); distinct misses are solved in parallel.
  std::vector<double> costs(const std::vector<Coalition>& cs);

  /// Full solution for `c`. Always solves (counted) and records the cost.
  DispatchSolution solve(const Coalition& c);

  bool cached(const Coalition& c) const;

  /// Number of dispatch programs solved so far.
  std::size_t lp_solves() const { return lp_solves_.load(); }
  /// Number of cost requests answered from the memo.
  std::size_t memo_hits() const { return memo_hits_.load(); }

 private:
  const Scenario* scenario_;
  DispatchOptions opts_;
  std::size_t workers_;
  mutable std::mutex mutex_;
  std::unordered_map<Coalition, double, CoalitionHash> memo_;
  std::atomic<std::size_t> lp_solves_{0};
  std::atomic<std::size_t> memo_hits_{0};
};

}  // namespace procoop

#endif  // PROCOOP_COST_EVALUATOR_HPP
