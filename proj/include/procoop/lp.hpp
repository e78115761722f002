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

/// \file procoop/lp.hpp
///
/// Small dense linear-programming solver used by the dispatch and
/// nucleolus stages.
///
///   minimize    c'z
///   subject to  row_lower <= A z <= row_upper
///               lower <= z <= upper
///
/// Infinite bounds are expressed with `lp::kInf`. Equality rows set both
/// row bounds to the same value.

#ifndef PROCOOP_LP_HPP
#define PROCOOP_LP_HPP

#include <cstddef>
#include <limits>
#include <string_view>
#include <utility>
#include <vector>

namespace procoop::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { less_equal, equal, greater_equal };

struct Term {
  std::size_t var;
  double coef;
};

struct Row {
  std::vector<Term> terms;
  double lower = -kInf;
  double upper = kInf;
};

struct Problem {
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;

  std::size_t num_vars() const { return cost.size(); }
  std::size_t num_rows() const { return rows.size(); }

  std::size_t add_variable(double lo, double hi, double c = 0.0);
  std::size_t add_row(std::vector<Term> terms, double lo, double hi);
  std::size_t add_row(std::vector<Term> terms, Sense sense, double rhs);
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

std::string_view to_string(Status s);

struct Solution {
  Status status = Status::infeasible;
  std::vector<double> x;
  double objective = 0.0;
  /// Row activities A x.
  std::vector<double> activity;
  /// d(objective)/d(active row bound); zero for rows that are not binding.
  /// A binding `<=` row of a minimization has a non-positive entry.
  std::vector<double> row_duals;
  /// c - A'y per variable.
  std::vector<double> reduced_costs;
  std::size_t iterations = 0;
};

struct Options {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::size_t max_iterations = 200000;
  /// Pivots between rebuilds of the tableau from the original rows.
  std::size_t refactor_interval = 100;
};

/// Solves `p` with a bounded-variable primal simplex on a condensed tableau.
///
/// Deterministic and reentrant; concurrent calls share no state.
/// Infeasibility and unboundedness are reported through `Solution::status`.
Solution solve(const Problem& p, const Options& opts = {});

}  // namespace procoop::lp

#endif  // PROCOOP_LP_HPP
