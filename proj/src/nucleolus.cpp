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


#include <bit>
#include <optional>
#include <utility>
#include <cmath>
#include <string>

#include "procoop/game.hpp"
#include "procoop/lp.hpp"

namespace procoop {

namespace {

// Orthonormal basis of the span of characteristic vectors fixed so far.
class Span {
 public:
  explicit Span(std::size_t n) : n_(n) {}

  std::size_t rank() const { return basis_.size(); }

  // Adds v if it is independent of the current span; returns whether it was.
  bool add(std::vector<double> v) {
    if (!residual(v)) return false;
    double norm = 0.0;
    for (double a : v) norm += a * a;
    norm = std::sqrt(norm);
    for (double& a : v) a /= norm;
    basis_.push_back(std::move(v));
    return true;
  }

  bool contains(Mask s) const {
    std::vector<double> v = indicator(s);
    return !residual(v);
  }

  std::vector<double> indicator(Mask s) const {
    std::vector<double> v(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      if (s >> i & 1u) v[i] = 1.0;
    }
    return v;
  }

 private:
  // Projects v onto the orthogonal complement (twice, for stability);
  // true when something is left.
  bool residual(std::vector<double>& v) const {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis_) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n_; ++i) dot += q[i] * v[i];
        for (std::size_t i = 0; i < n_; ++i) v[i] -= dot * q[i];
      }
    }
    double norm = 0.0;
    for (double a : v) norm += a * a;
    return norm > 1e-18;
  }

  std::size_t n_;
  std::vector<std::vector<double>> basis_;
};

enum class RowState : unsigned char { free, fixed, settled };

struct Round {
  lp::Problem problem;
  std::vector<Mask> row_mask;  // coalition behind each excess row (0 for efficiency)
};

}  // namespace

NucleolusError::NucleolusError(std::size_t round, const std::string& what)
    : std::runtime_error("nucleolus round " + std::to_string(round) + ": " + what), round_(round) {}

NucleolusResult nucleolus(const CoalitionGame& game, const NucleolusOptions& opts) {
  const std::size_t n = game.players();
  NucleolusResult out;
  out.allocation.provenance = Provenance::nucleolus;
  if (n == 0) return out;
  const Mask grand = game.grand();
  if (n == 1) {
    out.allocation.x = {game.value(grand)};
    return out;
  }

  const std::size_t count = std::size_t{1} << n;
  std::vector<RowState> state(count, RowState::free);
  std::vector<double> fixed_excess(count, 0.0);
  state[0] = RowState::settled;
  state[grand] = RowState::settled;
  std::vector<bool> player_fixed(n, false);

  Span span(n);
  span.add(span.indicator(grand));

  const std::size_t eps = n;
  auto build = [&](std::optional<std::pair<Mask, double>> tighten) {
    Round r;
    for (std::size_t i = 0; i < n; ++i) {
      const double vi = game.value(Mask{1} << i);
      r.problem.add_variable(vi, player_fixed[i] ? vi : lp::kInf, 0.0);
    }
    r.problem.add_variable(-lp::kInf, lp::kInf, 1.0);
    std::vector<lp::Term> all;
    for (std::size_t i = 0; i < n; ++i) all.push_back({i, 1.0});
    r.problem.add_row(std::move(all), lp::Sense::equal, game.value(grand));
    r.row_mask.push_back(0);
    for (std::size_t m = 1; m < count; ++m) {
      if (state[m] == RowState::settled) continue;
      std::vector<lp::Term> terms;
      for (std::size_t i = 0; i < n; ++i) {
        if (m >> i & 1u) terms.push_back({i, -1.0});
      }
      const double v = game.value(static_cast<Mask>(m));
      if (state[m] == RowState::fixed) {
        // v(S) - x(S) = e_S
        r.problem.add_row(std::move(terms), lp::Sense::equal, fixed_excess[m] - v);
      } else {
        // v(S) - x(S) <= eps (+ shift when probing tightness)
        terms.push_back({eps, -1.0});
        double rhs = -v;
        if (tighten && tighten->first == m) rhs -= tighten->second;
        r.problem.add_row(std::move(terms), lp::Sense::less_equal, rhs);
      }
      r.row_mask.push_back(static_cast<Mask>(m));
    }
    return r;
  };

  auto solve = [&](const Round& r, std::size_t round) {
    lp::Solution sol = lp::solve(r.problem, opts.lp);
    ++out.lp_solves;
    if (sol.status != lp::Status::optimal) {
      throw NucleolusError(round, "excess LP " + std::string(lp::to_string(sol.status)));
    }
    return sol;
  };

  // Coalitions already pinned by earlier equalities carry no new information.
  auto fix = [&](Mask m, double e) {
    if (!span.add(span.indicator(m))) {
      state[m] = RowState::settled;
      return false;
    }
    state[m] = RowState::fixed;
    fixed_excess[m] = e;
    return true;
  };

  for (std::size_t round = 1; span.rank() < n; ++round) {
    if (round > n + 1) throw NucleolusError(round, "did not converge");
    const Round r = build(std::nullopt);
    const lp::Solution sol = solve(r, round);
    const double eps_star = sol.x[eps];
    out.round_excess.push_back(eps_star);
    out.rounds = round;

    bool progress = false;
    for (std::size_t row = 1; row < r.row_mask.size(); ++row) {
      const Mask m = r.row_mask[row];
      if (state[m] != RowState::free) continue;
      if (-sol.row_duals[row] > opts.dual_threshold) progress = fix(m, eps_star) || progress;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (player_fixed[i]) continue;
      const double vi = game.value(Mask{1} << i);
      if (sol.reduced_costs[i] > opts.dual_threshold && sol.x[i] <= vi + opts.lp.primal_tol) {
        player_fixed[i] = true;
        std::vector<double> e(n, 0.0);
        e[i] = 1.0;
        progress = span.add(std::move(e)) || progress;
      }
    }

    if (!progress) {
      // Degenerate duals: confirm tightness directly. A coalition is tight in
      // every optimum iff forcing its excess below the optimum raises it.
      for (std::size_t row = 1; row < r.row_mask.size() && !progress; ++row) {
        const Mask m = r.row_mask[row];
        if (state[m] != RowState::free || span.contains(m)) continue;
        if (std::abs(sol.activity[row] - r.problem.rows[row].upper) > 1e-9) continue;
        const lp::Solution probe = solve(build(std::make_pair(m, opts.perturbation)), round);
        if (probe.objective > eps_star + 1e-10) progress = fix(m, eps_star);
      }
    }
    if (!progress) throw NucleolusError(round, "no new tight coalitions (rank stagnation)");

    for (std::size_t m = 1; m < count; ++m) {
      if (state[m] == RowState::free && span.contains(static_cast<Mask>(m))) state[m] = RowState::settled;
    }
    if (span.rank() == n) out.allocation.x.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

}  // namespace procoop
