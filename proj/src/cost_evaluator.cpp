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


#include "procoop/cost_evaluator.hpp"

#include "procoop/parallel.hpp"

namespace procoop {

CostEvaluator::CostEvaluator(const Scenario& s, DispatchOptions opts, std::size_t workers)
    : scenario_(&s), opts_(std::move(opts)), workers_(workers == 0 ? default_workers() : workers) {}

bool CostEvaluator::cached(const Coalition& c) const {
  if (c.empty()) return true;
  std::lock_guard lock(mutex_);
  return memo_.contains(c);
}

double CostEvaluator::cost(const Coalition& c) {
  return costs({c}).front();
}

std::vector<double> CostEvaluator::costs(const std::vector<Coalition>& cs) {
  std::vector<double> out(cs.size(), 0.0);
  std::vector<std::size_t> todo;
  {
    std::lock_guard lock(mutex_);
    std::unordered_map<Coalition, std::size_t, CoalitionHash> first_seen;
    for (std::size_t k = 0; k < cs.size(); ++k) {
      if (cs[k].empty()) continue;
      if (auto it = memo_.find(cs[k]); it != memo_.end()) {
        out[k] = it->second;
        ++memo_hits_;
      } else if (first_seen.try_emplace(cs[k], k).second) {
        todo.push_back(k);
      }
    }
  }

  std::vector<double> solved(todo.size());
  parallel_for(todo.size(), workers_, [&](std::size_t j) {
    solved[j] = coalition_cost(cs[todo[j]], *scenario_, opts_).cost;
    ++lp_solves_;
  });

  std::lock_guard lock(mutex_);
  for (std::size_t j = 0; j < todo.size(); ++j) memo_.emplace(cs[todo[j]], solved[j]);
  for (std::size_t k = 0; k < cs.size(); ++k) {
    if (cs[k].empty()) continue;
    out[k] = memo_.at(cs[k]);
  }
  return out;
}

DispatchSolution CostEvaluator::solve(const Coalition& c) {
  DispatchSolution sol = coalition_cost(c, *scenario_, opts_);
  ++lp_solves_;
  std::lock_guard lock(mutex_);
  memo_.insert_or_assign(c, sol.cost);
  return sol;
}

}  // namespace procoop
