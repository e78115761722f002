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


/// \file procoop/clustering.hpp
///
/// K-means over per-prosumer load profiles with multi-start selection: many
/// independent Lloyd runs, a relaxed band above the best total Euclidean
/// distance, and within the band the run that spreads prosumers most evenly.

#ifndef PROCOOP_CLUSTERING_HPP
#define PROCOOP_CLUSTERING_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace procoop {

/// One row per prosumer, one column per interval; row-major.
class ProfileMatrix {
 public:
  ProfileMatrix() = default;
  ProfileMatrix(std::size_t rows, std::size_t cols);
  static ProfileMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  double& operator()(std::size_t i, std::size_t t) { return data_[i * cols_ + t]; }
  double operator()(std::size_t i, std::size_t t) const { return data_[i * cols_ + t]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct ClusterAssignment {
  std::size_t k = 0;
  std::vector<std::vector<double>> centroids;
  /// Cluster index in [0, k) per profile row.
  std::vector<std::size_t> assignment;
  std::vector<std::size_t> sizes;
  /// Sum of (non-squared) Euclidean distances from each row to its centroid.
  double total_distance = 0.0;
  /// Sum of squared distances; the quantity Lloyd iterations minimize.
  double objective = 0.0;
  /// Squared-distance objective after every update step.
  std::vector<double> objective_history;
  std::size_t iterations = 0;

  std::size_t min_size() const;
  std::size_t max_size() const;
};

/// Lloyd's algorithm from a Forgy start (k distinct rows drawn with `seed`),
/// stopping at a fixed point of the assignment or after `max_iterations`.
/// A cluster that empties is re-seeded at the row farthest from its own
/// centroid. Throws std::invalid_argument unless 1 <= k <= rows.
ClusterAssignment lloyd_kmeans(const ProfileMatrix& profiles, std::size_t k, std::uint64_t seed,
                               std::size_t max_iterations = 300);

/// Index of the selected run: among runs whose total distance is within
/// `eurelax` of the smallest, prefer the largest smallest cluster, then the
/// smallest largest cluster, then the lowest index.
std::size_t choose_run(std::span<const ClusterAssignment> runs, double eurelax);

struct SelectionOptions {
  std::size_t runs = 1000;
  double eurelax = 0.01;
  std::uint64_t master_seed = 0;
  std::size_t workers = 0;
};

struct ClusteringSelection {
  ClusterAssignment chosen;
  std::size_t run = 0;
  double eumin = 0.0;
  /// Runs inside the relaxed band, the minimum itself included.
  std::size_t in_band = 0;
  std::vector<double> distances;
};

/// Seed of run `r` under `master`.
std::uint64_t run_seed(std::uint64_t master, std::size_t r);

ClusteringSelection select_clustering(const ProfileMatrix& profiles, std::size_t k, const SelectionOptions& opts = {});

}  // namespace procoop

#endif  // PROCOOP_CLUSTERING_HPP
