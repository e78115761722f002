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

/// \file procoop/dispatch.hpp
///
/// Joint battery scheduling of a coalition: the linear program whose optimum
/// is the coalition's energy cost C(S).
///
/// Per member i and interval t the program carries a charge c_it >= 0 and a
/// discharge d_it >= 0 (battery energy exchange b_it = c_it - d_it); per
/// interval it carries the coalition's import g+_t >= 0 and export magnitude
/// g-_t >= 0. Exported energy earns the export price, so g-_t enters the
/// objective with coefficient -p^s_t.

#ifndef PROCOOP_DISPATCH_HPP
#define PROCOOP_DISPATCH_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "procoop/core.hpp"
#include "procoop/lp.hpp"

namespace procoop {

/// Count of scalar inequalities/equalities by family. Variable bounds on the
/// battery variables are counted as two inequalities each, ranged energy
/// rows as two.
struct RowCensus {
  std::size_t balance = 0;
  std::size_t bound = 0;
  std::size_t energy = 0;
  std::size_t cycle = 0;
};

struct DispatchLP {
  lp::Problem problem;
  std::vector<std::size_t> members;
  std::size_t horizon = 0;
  RowCensus census;

  std::size_t num_variables() const { return problem.num_vars(); }
  std::size_t charge_var(std::size_t pos, std::size_t t) const { return 2 * (pos * horizon + t); }
  std::size_t discharge_var(std::size_t pos, std::size_t t) const { return 2 * (pos * horizon + t) + 1; }
  std::size_t import_var(std::size_t t) const { return 2 * members.size() * horizon + 2 * t; }
  std::size_t export_var(std::size_t t) const { return 2 * members.size() * horizon + 2 * t + 1; }
};

/// Builds the dispatch program of `coalition` over the validated scenario `s`.
DispatchLP build_dispatch_lp(const Coalition& coalition, const Scenario& s);

struct DispatchSolution {
  double cost = 0.0;
  std::vector<std::size_t> members;
  /// schedule[pos][t]: battery energy exchange of members[pos]; charge positive.
  std::vector<std::vector<double>> schedule;
  std::vector<double> imports;
  std::vector<double> exports;
};

struct DispatchOptions {
  /// Solve with batteries of identical per-unit parameters merged into one
  /// aggregate unit, then split the aggregate schedule in proportion to
  /// capacity. The optimal cost is unchanged; the program is much smaller.
  bool merge_identical_storage = true;
  lp::Options lp;
};

class DispatchError : public std::runtime_error {
 public:
  explicit DispatchError(lp::Status status);
  lp::Status status() const { return status_; }

 private:
  lp::Status status_;
};

/// Minimum joint energy cost of `coalition` and a minimizing schedule.
/// The empty coalition costs zero. Throws DispatchError when the program is
/// not solved to optimality.
DispatchSolution coalition_cost(const Coalition& coalition, const Scenario& s, const DispatchOptions& opts = {});

/// C({i}).
double individual_cost(std::size_t i, const Scenario& s, const DispatchOptions& opts = {});

/// Evaluates sum_t p^b_t [L_t]^+ + p^s_t [L_t]^- with L_t the coalition's net
/// load after storage, for an arbitrary schedule laid out like
/// DispatchSolution::schedule.
double evaluate_cost(const Scenario& s, const Coalition& coalition, const std::vector<std::vector<double>>& schedule);

}  // namespace procoop

#endif  // PROCOOP_DISPATCH_HPP
