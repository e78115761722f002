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

// Bounded-variable primal simplex over a condensed (Tucker) tableau.
//
// Every row i gets a logical variable r_i = a_i'z carrying the row bounds,
// so the system is A z - r = 0 with box bounds on all n + m variables. The
// tableau stores only the m x n coefficients expressing basic variables in
// terms of nonbasic ones, which keeps problems with many rows and few
// columns (the nucleolus LPs) cheap. Phase 1 minimizes the sum of bound
// violations of basic variables; phase 2 minimizes c'z. The tableau is
// periodically rebuilt from the original rows to stop error accumulation.

#include "procoop/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace procoop::lp {

std::size_t Problem::add_variable(double lo, double hi, double c) {
  cost.push_back(c);
  lower.push_back(lo);
  upper.push_back(hi);
  return cost.size() - 1;
}

std::size_t Problem::add_row(std::vector<Term> terms, double lo, double hi) {
  rows.push_back(Row{std::move(terms), lo, hi});
  return rows.size() - 1;
}

std::size_t Problem::add_row(std::vector<Term> terms, Sense sense, double rhs) {
  switch (sense) {
    case Sense::less_equal:
      return add_row(std::move(terms), -kInf, rhs);
    case Sense::equal:
      return add_row(std::move(terms), rhs, rhs);
    case Sense::greater_equal:
      return add_row(std::move(terms), rhs, kInf);
  }
  return rows.size();
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::optimal:
      return "optimal";
    case Status::infeasible:
      return "infeasible";
    case Status::unbounded:
      return "unbounded";
    case Status::iteration_limit:
      return "iteration_limit";
  }
  return "unknown";
}

namespace {

enum class Bound : unsigned char { lower, upper, free };

// Problem after removing fixed columns and empty rows.
struct Reduced {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> a;  // m x n, row-major
  std::vector<double> cost, lo, hi;
  std::vector<double> row_lo, row_hi;
  std::vector<std::size_t> col_of;  // reduced col -> original var
  std::vector<std::size_t> row_of;  // reduced row -> original row
  bool infeasible = false;
};

Reduced presolve(const Problem& p, double tol) {
  const std::size_t nv = p.num_vars();
  if (p.lower.size() != nv || p.upper.size() != nv) throw std::invalid_argument("lp::solve: bound vectors do not match cost");
  Reduced r;
  std::vector<std::size_t> new_index(nv, SIZE_MAX);
  for (std::size_t j = 0; j < nv; ++j) {
    if (!std::isfinite(p.cost[j]) || std::isnan(p.lower[j]) || std::isnan(p.upper[j])) {
      throw std::invalid_argument("lp::solve: non-finite cost or NaN bound on variable " + std::to_string(j));
    }
    if (p.lower[j] > p.upper[j] + tol || p.lower[j] == kInf || p.upper[j] == -kInf) {
      r.infeasible = true;
    }
    if (p.upper[j] - p.lower[j] > 0.0) {
      new_index[j] = r.col_of.size();
      r.col_of.push_back(j);
    }
  }
  r.n = r.col_of.size();
  for (std::size_t j : r.col_of) {
    r.cost.push_back(p.cost[j]);
    r.lo.push_back(p.lower[j]);
    r.hi.push_back(p.upper[j]);
  }

  std::vector<double> dense(r.n);
  for (std::size_t i = 0; i < p.num_rows(); ++i) {
    const Row& row = p.rows[i];
    if (std::isnan(row.lower) || std::isnan(row.upper)) throw std::invalid_argument("lp::solve: NaN row bound");
    std::fill(dense.begin(), dense.end(), 0.0);
    double shift = 0.0;
    bool any = false;
    for (const Term& t : row.terms) {
      if (t.var >= nv) throw std::invalid_argument("lp::solve: row references undeclared variable");
      if (!std::isfinite(t.coef)) throw std::invalid_argument("lp::solve: non-finite coefficient");
      if (t.coef == 0.0) continue;
      if (new_index[t.var] == SIZE_MAX) {
        shift += t.coef * p.lower[t.var];
      } else {
        dense[new_index[t.var]] += t.coef;
        any = true;
      }
    }
    const double lo = row.lower - shift;
    const double hi = row.upper - shift;
    if (lo > hi + tol) r.infeasible = true;
    if (any) any = std::any_of(dense.begin(), dense.end(), [](double v) { return v != 0.0; });
    if (!any) {
      if (lo > tol || hi < -tol) r.infeasible = true;
      continue;
    }
    if (lo == -kInf && hi == kInf) continue;
    r.row_of.push_back(i);
    r.row_lo.push_back(lo);
    r.row_hi.push_back(hi);
    r.a.insert(r.a.end(), dense.begin(), dense.end());
  }
  r.m = r.row_of.size();
  return r;
}

class Tableau {
 public:
  Tableau(const Reduced& red, const Options& opts) : red_(red), opts_(opts), m_(red.m), n_(red.n) {
    const std::size_t total = n_ + m_;
    lo_.resize(total);
    hi_.resize(total);
    cost_.assign(total, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = red.lo[j];
      hi_[j] = red.hi[j];
      cost_[j] = red.cost[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      lo_[n_ + i] = red.row_lo[i];
      hi_[n_ + i] = red.row_hi[i];
    }
    t_ = red.a;
    basic_.resize(m_);
    nonbasic_.resize(n_);
    is_basic_.assign(total, false);
    where_.resize(total);
    state_.assign(total, Bound::free);
    val_.assign(total, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasic_[j] = j;
      where_[j] = j;
      if (std::isfinite(lo_[j])) {
        state_[j] = Bound::lower;
        val_[j] = lo_[j];
      } else if (std::isfinite(hi_[j])) {
        state_[j] = Bound::upper;
        val_[j] = hi_[j];
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      is_basic_[n_ + i] = true;
      where_[n_ + i] = i;
    }
    recompute_basic_values();
    recompute_reduced_costs();
  }

  Status run(std::size_t& iterations) {
    std::size_t since_refactor = 0;
    std::size_t degenerate_run = 0;
    bool clean = true;
    bool bland = false;
    std::vector<double> grad(n_);
    std::vector<signed char> infeas(m_);

    for (iterations = 0; iterations < opts_.max_iterations; ++iterations) {
      if (since_refactor >= opts_.refactor_interval) {
        refactor();
        since_refactor = 0;
        clean = true;
      }

      bool phase1 = false;
      for (std::size_t i = 0; i < m_; ++i) {
        const std::size_t k = basic_[i];
        const double v = val_[k];
        infeas[i] = v < lo_[k] - opts_.primal_tol ? -1 : (v > hi_[k] + opts_.primal_tol ? 1 : 0);
        phase1 = phase1 || infeas[i] != 0;
      }

      const double* d = d_.data();
      if (phase1) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
          if (infeas[i] == 0) continue;
          const double s = infeas[i];
          const double* row = &t_[i * n_];
          for (std::size_t j = 0; j < n_; ++j) grad[j] += s * row[j];
        }
        d = grad.data();
      }

      int dir = 0;
      const std::size_t c = choose_entering(d, bland, dir);
      if (c == SIZE_MAX) {
        if (!clean) {
          refactor();
          since_refactor = 0;
          clean = true;
          continue;
        }
        return phase1 ? Status::infeasible : Status::optimal;
      }

      const Step step = ratio_test(c, dir, phase1 ? infeas.data() : nullptr, bland);
      if (step.kind == Step::unbounded) {
        if (phase1) return Status::infeasible;
        if (!clean) {
          refactor();
          since_refactor = 0;
          clean = true;
          continue;
        }
        return Status::unbounded;
      }

      const std::size_t entering = nonbasic_[c];
      val_[entering] += dir * step.theta;
      if (step.theta != 0.0) {
        for (std::size_t i = 0; i < m_; ++i) {
          const double a = t_[i * n_ + c];
          if (a != 0.0) val_[basic_[i]] += dir * a * step.theta;
        }
      }

      if (step.theta > opts_.primal_tol) {
        degenerate_run = 0;
        bland = false;
      } else if (++degenerate_run > 50) {
        bland = true;
      }

      if (step.kind == Step::flip) {
        state_[entering] = dir > 0 ? Bound::upper : Bound::lower;
        val_[entering] = dir > 0 ? hi_[entering] : lo_[entering];
        continue;
      }

      const std::size_t leaving = basic_[step.row];
      val_[leaving] = step.to_upper ? hi_[leaving] : lo_[leaving];
      state_[leaving] = step.to_upper ? Bound::upper : Bound::lower;
      if (lo_[entering] == -kInf && hi_[entering] == kInf) state_[entering] = Bound::free;
      pivot(step.row, c);
      clean = false;
      ++since_refactor;
    }
    return Status::iteration_limit;
  }

  double value(std::size_t k) const { return val_[k]; }

  // Row sensitivity d(obj)/d(bound) for reduced row i.
  double row_dual(std::size_t i) const {
    const std::size_t k = n_ + i;
    return is_basic_[k] ? 0.0 : d_[where_[k]];
  }

 private:
  struct Step {
    enum Kind { pivot, flip, unbounded } kind = unbounded;
    std::size_t row = SIZE_MAX;
    double theta = 0.0;
    bool to_upper = false;
  };

  std::size_t choose_entering(const double* d, bool bland, int& dir) const {
    std::size_t best = SIZE_MAX;
    double best_score = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const std::size_t k = nonbasic_[j];
      if (lo_[k] == hi_[k]) continue;
      const double dj = d[j];
      int candidate_dir = 0;
      if (dj < -opts_.dual_tol && state_[k] != Bound::upper) {
        candidate_dir = 1;
      } else if (dj > opts_.dual_tol && state_[k] != Bound::lower) {
        candidate_dir = -1;
      }
      if (candidate_dir == 0) continue;
      if (bland) {
        if (best == SIZE_MAX || k < nonbasic_[best]) {
          best = j;
          dir = candidate_dir;
        }
      } else if (std::abs(dj) > best_score) {
        best_score = std::abs(dj);
        best = j;
        dir = candidate_dir;
      }
    }
    return best;
  }

  Step ratio_test(std::size_t c, int dir, const signed char* infeas, bool bland) const {
    const std::size_t entering = nonbasic_[c];
    const double flip = hi_[entering] - lo_[entering];
    const double ptol = opts_.primal_tol;

    // Pass 1: largest step allowed with bounds relaxed by the primal tolerance.
    double theta_max = kInf;
    for (std::size_t i = 0; i < m_; ++i) {
      const double alpha = dir * t_[i * n_ + c];
      if (std::abs(alpha) <= opts_.pivot_tol) continue;
      const double slack = blocking_slack(i, alpha, infeas);
      if (slack == kInf) continue;
      theta_max = std::min(theta_max, (slack + ptol) / std::abs(alpha));
    }

    Step step;
    if (flip <= theta_max && flip < kInf) {
      step.kind = Step::flip;
      step.theta = flip;
      return step;
    }
    if (theta_max == kInf) return step;

    // Pass 2: among rows blocking within theta_max, take the largest pivot
    // (or the lowest variable index under Bland's rule).
    double best_alpha = 0.0;
    double best_ratio = kInf;
    for (std::size_t i = 0; i < m_; ++i) {
      const double alpha = dir * t_[i * n_ + c];
      if (std::abs(alpha) <= opts_.pivot_tol) continue;
      const double slack = blocking_slack(i, alpha, infeas);
      if (slack == kInf) continue;
      const double ratio = std::max(slack, 0.0) / std::abs(alpha);
      if (ratio > theta_max) continue;
      bool take = false;
      if (step.row == SIZE_MAX) {
        take = true;
      } else if (bland) {
        take = ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && basic_[i] < basic_[step.row]);
      } else {
        take = std::abs(alpha) > best_alpha;
      }
      if (take) {
        step.row = i;
        best_alpha = std::abs(alpha);
        best_ratio = ratio;
      }
    }
    step.kind = Step::pivot;
    step.theta = best_ratio;
    const std::size_t leaving = basic_[step.row];
    const double alpha = dir * t_[step.row * n_ + c];
    const bool below = infeas != nullptr && infeas[step.row] < 0;
    const bool above = infeas != nullptr && infeas[step.row] > 0;
    if (below) {
      step.to_upper = false;
    } else if (above) {
      step.to_upper = true;
    } else {
      step.to_upper = alpha > 0.0;
    }
    if (lo_[leaving] == hi_[leaving]) step.to_upper = false;
    return step;
  }

  // Distance the basic variable in row i may travel in direction sign(alpha)
  // before it blocks; kInf when it never blocks.
  double blocking_slack(std::size_t i, double alpha, const signed char* infeas) const {
    const std::size_t k = basic_[i];
    const double v = val_[k];
    if (infeas != nullptr && infeas[i] < 0) return alpha > 0.0 ? lo_[k] - v : kInf;
    if (infeas != nullptr && infeas[i] > 0) return alpha < 0.0 ? v - hi_[k] : kInf;
    if (alpha > 0.0) return hi_[k] == kInf ? kInf : hi_[k] - v;
    return lo_[k] == -kInf ? kInf : v - lo_[k];
  }

  void pivot(std::size_t p, std::size_t c) {
    double* prow = &t_[p * n_];
    const double piv = prow[c];
    const double inv = 1.0 / piv;
    for (std::size_t j = 0; j < n_; ++j) prow[j] = -prow[j] * inv;
    prow[c] = inv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == p) continue;
      double* row = &t_[i * n_];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n_; ++j) row[j] += f * prow[j];
      row[c] = f * inv;
    }
    {
      const double f = d_[c];
      if (f != 0.0) {
        for (std::size_t j = 0; j < n_; ++j) d_[j] += f * prow[j];
        d_[c] = f * inv;
      }
    }
    const std::size_t entering = nonbasic_[c];
    const std::size_t leaving = basic_[p];
    basic_[p] = entering;
    nonbasic_[c] = leaving;
    is_basic_[entering] = true;
    is_basic_[leaving] = false;
    where_[entering] = p;
    where_[leaving] = c;
  }

  void recompute_basic_values() {
    for (std::size_t i = 0; i < m_; ++i) {
      const double* row = &t_[i * n_];
      double s = 0.0;
      for (std::size_t j = 0; j < n_; ++j) s += row[j] * val_[nonbasic_[j]];
      val_[basic_[i]] = s;
    }
  }

  void recompute_reduced_costs() {
    d_.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) d_[j] = cost_[nonbasic_[j]];
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost_[basic_[i]];
      if (cb == 0.0) continue;
      const double* row = &t_[i * n_];
      for (std::size_t j = 0; j < n_; ++j) d_[j] += cb * row[j];
    }
  }

  // Rebuilds the tableau for the current basis from the original rows.
  void refactor() {
    std::vector<std::size_t> sb_rows;   // tableau rows holding basic structurals
    std::vector<std::size_t> rn_rows;   // original rows whose logical is nonbasic
    for (std::size_t p = 0; p < m_; ++p) {
      if (basic_[p] < n_) sb_rows.push_back(p);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (!is_basic_[n_ + i]) rn_rows.push_back(i);
    }
    const std::size_t s = sb_rows.size();
    if (rn_rows.size() != s) return;

    Eigen::MatrixXd z(s, n_);
    if (s > 0) {
      Eigen::MatrixXd mat(s, s);
      for (std::size_t a = 0; a < s; ++a) {
        for (std::size_t b = 0; b < s; ++b) mat(a, b) = red_.a[rn_rows[a] * n_ + basic_[sb_rows[b]]];
      }
      Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(s, n_);
      std::vector<std::size_t> rn_pos(m_, SIZE_MAX);
      for (std::size_t a = 0; a < s; ++a) rn_pos[rn_rows[a]] = a;
      for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t k = nonbasic_[j];
        if (k >= n_) {
          rhs(rn_pos[k - n_], j) = 1.0;
        } else {
          for (std::size_t a = 0; a < s; ++a) rhs(a, j) = -red_.a[rn_rows[a] * n_ + k];
        }
      }
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(mat);
      if (!(std::abs(lu.determinant()) > 0.0) || !std::isfinite(lu.determinant())) return;
      z = lu.solve(rhs);
      if (!z.allFinite()) return;
    }

    for (std::size_t b = 0; b < s; ++b) {
      double* row = &t_[sb_rows[b] * n_];
      for (std::size_t j = 0; j < n_; ++j) row[j] = z(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j));
    }
    for (std::size_t p = 0; p < m_; ++p) {
      if (basic_[p] < n_) continue;
      const std::size_t orig = basic_[p] - n_;
      const double* arow = &red_.a[orig * n_];
      double* row = &t_[p * n_];
      for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t k = nonbasic_[j];
        double v = k < n_ ? arow[k] : 0.0;
        for (std::size_t b = 0; b < s; ++b) {
          const double coef = arow[basic_[sb_rows[b]]];
          if (coef != 0.0) v += coef * z(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j));
        }
        row[j] = v;
      }
    }
    recompute_basic_values();
    recompute_reduced_costs();
  }

  const Reduced& red_;
  const Options& opts_;
  std::size_t m_, n_;
  std::vector<double> lo_, hi_, cost_;
  std::vector<double> t_;
  std::vector<double> d_;
  std::vector<std::size_t> basic_, nonbasic_, where_;
  std::vector<bool> is_basic_;
  std::vector<Bound> state_;
  std::vector<double> val_;
};

}  // namespace

Solution solve(const Problem& p, const Options& opts) {
  Solution sol;
  const Reduced red = presolve(p, opts.primal_tol);
  const std::size_t nv = p.num_vars();
  sol.x.assign(nv, 0.0);
  sol.row_duals.assign(p.num_rows(), 0.0);
  if (red.infeasible) {
    sol.status = Status::infeasible;
    return sol;
  }

  for (std::size_t j = 0; j < nv; ++j) {
    if (p.upper[j] - p.lower[j] <= 0.0) sol.x[j] = p.lower[j];
  }

  Tableau tab(red, opts);
  sol.status = tab.run(sol.iterations);
  for (std::size_t j = 0; j < red.n; ++j) sol.x[red.col_of[j]] = tab.value(j);
  for (std::size_t i = 0; i < red.m; ++i) sol.row_duals[red.row_of[i]] = tab.row_dual(i);

  sol.objective = 0.0;
  for (std::size_t j = 0; j < nv; ++j) sol.objective += p.cost[j] * sol.x[j];
  sol.activity.assign(p.num_rows(), 0.0);
  sol.reduced_costs = p.cost;
  for (std::size_t i = 0; i < p.num_rows(); ++i) {
    for (const Term& t : p.rows[i].terms) {
      sol.activity[i] += t.coef * sol.x[t.var];
      sol.reduced_costs[t.var] -= sol.row_duals[i] * t.coef;
    }
  }
  return sol;
}

}  // namespace procoop::lp
