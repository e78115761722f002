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


#include "procoop/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "procoop/parallel.hpp"

namespace procoop {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double d = a[t] - b[t];
    s += d * d;
  }
  return s;
}

void update_centroids(const ProfileMatrix& m, ClusterAssignment& c) {
  for (auto& p : c.centroids) std::fill(p.begin(), p.end(), 0.0);
  std::fill(c.sizes.begin(), c.sizes.end(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto& p = c.centroids[c.assignment[i]];
    const auto row = m.row(i);
    for (std::size_t t = 0; t < row.size(); ++t) p[t] += row[t];
    ++c.sizes[c.assignment[i]];
  }
  for (std::size_t j = 0; j < c.k; ++j) {
    if (c.sizes[j] == 0) continue;
    const double inv = 1.0 / static_cast<double>(c.sizes[j]);
    for (double& v : c.centroids[j]) v *= inv;
  }
}

double squared_objective(const ProfileMatrix& m, const ClusterAssignment& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) s += squared_distance(m.row(i), c.centroids[c.assignment[i]]);
  return s;
}

}  // namespace

ProfileMatrix::ProfileMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

ProfileMatrix ProfileMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  ProfileMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw std::invalid_argument("ProfileMatrix: ragged rows");
    for (std::size_t t = 0; t < cols; ++t) {
      if (!std::isfinite(rows[i][t])) throw std::invalid_argument("ProfileMatrix: non-finite entry");
      m(i, t) = rows[i][t];
    }
  }
  return m;
}

std::size_t ClusterAssignment::min_size() const {
  return sizes.empty() ? 0 : *std::min_element(sizes.begin(), sizes.end());
}

std::size_t ClusterAssignment::max_size() const {
  return sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
}

ClusterAssignment lloyd_kmeans(const ProfileMatrix& profiles, std::size_t k, std::uint64_t seed,
                               std::size_t max_iterations) {
  const std::size_t n = profiles.rows();
  if (k < 1 || k > n) {
    throw std::invalid_argument("lloyd_kmeans: need 1 <= k <= rows, got k=" + std::to_string(k) + " for " +
                                std::to_string(n) + " rows");
  }

  ClusterAssignment c;
  c.k = k;
  c.sizes.assign(k, 0);
  c.assignment.assign(n, SIZE_MAX);

  // Forgy: k distinct rows, partial Fisher-Yates.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t j = 0; j < k; ++j) {
    std::uniform_int_distribution<std::size_t> pick(j, n - 1);
    std::swap(order[j], order[pick(rng)]);
    const auto row = profiles.row(order[j]);
    c.centroids.emplace_back(row.begin(), row.end());
  }

  std::vector<double> dist(n, 0.0);
  for (c.iterations = 0; c.iterations < max_iterations; ++c.iterations) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = squared_distance(profiles.row(i), c.centroids[0]);
      for (std::size_t j = 1; j < k; ++j) {
        const double d = squared_distance(profiles.row(i), c.centroids[j]);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      dist[i] = best_d;
      if (c.assignment[i] != best) {
        c.assignment[i] = best;
        changed = true;
      }
    }
    if (!changed) break;

    std::fill(c.sizes.begin(), c.sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) ++c.sizes[c.assignment[i]];
    for (std::size_t j = 0; j < k; ++j) {
      if (c.sizes[j] != 0) continue;
      std::size_t far = SIZE_MAX;
      for (std::size_t i = 0; i < n; ++i) {
        if (c.sizes[c.assignment[i]] < 2) continue;
        if (far == SIZE_MAX || dist[i] > dist[far]) far = i;
      }
      --c.sizes[c.assignment[far]];
      c.assignment[far] = j;
      c.sizes[j] = 1;
      dist[far] = 0.0;
      const auto row = profiles.row(far);
      c.centroids[j].assign(row.begin(), row.end());
    }

    update_centroids(profiles, c);
    c.objective_history.push_back(squared_objective(profiles, c));
  }

  update_centroids(profiles, c);
  c.objective = squared_objective(profiles, c);
  c.total_distance = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    c.total_distance += std::sqrt(squared_distance(profiles.row(i), c.centroids[c.assignment[i]]));
  }
  return c;
}

std::size_t choose_run(std::span<const ClusterAssignment> runs, double eurelax) {
  if (runs.empty()) throw std::invalid_argument("choose_run: no runs");
  double eumin = runs[0].total_distance;
  for (const auto& r : runs) eumin = std::min(eumin, r.total_distance);
  const double bound = eumin * (1.0 + eurelax);

  std::size_t best = SIZE_MAX;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (runs[r].total_distance > bound) continue;
    if (best == SIZE_MAX) {
      best = r;
      continue;
    }
    const auto lo_r = runs[r].min_size(), lo_b = runs[best].min_size();
    if (lo_r > lo_b || (lo_r == lo_b && runs[r].max_size() < runs[best].max_size())) best = r;
  }
  return best;
}

std::uint64_t run_seed(std::uint64_t master, std::size_t r) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(static_cast<std::uint64_t>(r) >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

ClusteringSelection select_clustering(const ProfileMatrix& profiles, std::size_t k, const SelectionOptions& opts) {
  if (opts.runs < 1) throw std::invalid_argument("select_clustering: runs must be >= 1");
  std::vector<ClusterAssignment> runs(opts.runs);
  parallel_for(opts.runs, opts.workers,
               [&](std::size_t r) { runs[r] = lloyd_kmeans(profiles, k, run_seed(opts.master_seed, r)); });

  ClusteringSelection sel;
  sel.distances.reserve(runs.size());
  for (const auto& r : runs) sel.distances.push_back(r.total_distance);
  sel.eumin = *std::min_element(sel.distances.begin(), sel.distances.end());
  const double bound = sel.eumin * (1.0 + opts.eurelax);
  sel.in_band = static_cast<std::size_t>(
      std::count_if(sel.distances.begin(), sel.distances.end(), [&](double d) { return d <= bound; }));
  sel.run = choose_run(runs, opts.eurelax);
  sel.chosen = std::move(runs[sel.run]);
  return sel;
}

}  // namespace procoop
