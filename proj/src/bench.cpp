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


#include "procoop/bench.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "procoop/cost_evaluator.hpp"

namespace procoop {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return is;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Reads a CSV with a fixed header, returning the data rows.
std::vector<std::vector<std::string>> read_table(const std::filesystem::path& path, const std::string& header) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw std::runtime_error(path.string() + ":1: expected header '" + header + "'");
  const std::size_t width = split(header).size();
  std::vector<std::vector<std::string>> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != width) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(width) +
                               " fields, got " + std::to_string(cells.size()));
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

double to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw std::runtime_error("not a number: '" + s + "'");
  return v;
}

std::size_t to_size(const std::string& s) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') throw std::runtime_error("not an integer: '" + s + "'");
  return static_cast<std::size_t>(v);
}

std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

int der_type(const Prosumer& p) { return (p.has_pv ? 1 : 0) + (p.has_storage() ? 2 : 0); }

void census_lines(std::ostream& os, const Scenario& s, std::span<const std::size_t> assignment, std::size_t k) {
  const auto census = der_census(s, assignment, k);
  os << "cluster census (members / with PV / with storage):\n";
  for (std::size_t j = 0; j < census.size(); ++j) {
    os << "  cluster " << (j + 1) << ": " << census[j].prosumers << " / " << census[j].pv << " / "
       << census[j].storage << "\n";
  }
  os << "DER purity: " << fixed(der_purity(s, assignment, k), 4) << "\n";
}

void scenario_lines(std::ostream& os, const Scenario& s, const RunInfo& info) {
  os << "scenario: " << info.source << "\n";
  os << "prosumers: " << s.size() << ", intervals: " << s.horizon << " x " << s.interval_hours << " h\n";
  os << "seed: " << info.seed << "\n";
  os << "workers: " << info.workers << "\n";
  os << "solver: procoop bounded-variable simplex\n";
}

void clustered_lines(std::ostream& os, const Scenario& s, const PipelineResult& r, const PipelineOptions& opts) {
  const auto& sel = r.selection;
  os << "clusters: " << opts.k << "\n";
  os << "k-means runs: " << opts.selection.runs << ", eurelax: " << opts.selection.eurelax
     << ", master seed: " << opts.selection.master_seed << "\n";
  os << "chosen run: " << sel.run << " (seed " << run_seed(opts.selection.master_seed, sel.run) << ")"
     << ", total distance " << fixed(sel.chosen.total_distance) << ", eumin " << fixed(sel.eumin)
     << ", runs in band " << sel.in_band << "\n";
  os << "cluster sizes: min " << sel.chosen.min_size() << ", max " << sel.chosen.max_size() << "\n";
  census_lines(os, s, sel.chosen.assignment, opts.k);
  os << "de-clustering mode: " << to_string(r.mode) << "\n";
  os << "grand coalition cost: " << fixed(r.grand.cost) << "\n";
  os << "clustered game v(N): " << fixed(r.clustered.game.value(r.clustered.game.grand())) << "\n";
  os << "payoff total (paper-literal): " << fixed(r.total_paper_literal) << "\n";
  os << "payoff total (efficiency-preserving): " << fixed(r.total_efficiency_preserving) << "\n";
  if (!r.payoffs.equal_split_clusters.empty()) {
    os << "equal-split clusters:";
    for (std::size_t j : r.payoffs.equal_split_clusters) os << " " << (j + 1);
    os << "\n";
  }
  os << "dispatch LP solves: " << r.dispatch_lp_solves << " (1 + N + 2^k - 1 = "
     << (1 + s.size() + ((std::size_t{1} << opts.k) - 1)) << ", unions already cached: " << r.dispatch_reused << ")\n";
  os << "nucleolus LP solves: " << r.nucleolus_lp_solves << " in " << r.cluster_nucleolus.rounds << " rounds\n";
  const auto& t = r.times;
  os << "time grand dispatch: " << fixed(t.grand_dispatch_s, 3) << " s\n";
  os << "time stand-alone costs: " << fixed(t.singletons_s, 3) << " s\n";
  os << "time clustering: " << fixed(t.clustering_s, 3) << " s\n";
  os << "time clustered game: " << fixed(t.clustered_game_s, 3) << " s\n";
  os << "time nucleolus: " << fixed(t.nucleolus_s, 3) << " s\n";
  os << "time de-clustering: " << fixed(t.decluster_s, 3) << " s\n";
}

void full_lines(std::ostream& os, const FullResult& r) {
  const auto& g = r.build.game;
  os << "v(N): " << fixed(g.value(g.grand())) << "\n";
  os << "grand coalition cost: " << fixed(r.build.costs.back()) << "\n";
  os << "nucleolus rounds: " << r.nucleolus.rounds << "\n";
  os << "efficiency gap: " << num(r.efficiency_gap) << "\n";
  os << "max excess: " << fixed(r.stability.max_excess, 9) << " (mask " << r.stability.argmax << ")\n";
  os << "dispatch LP solves: " << r.dispatch_lp_solves() << "\n";
  os << "nucleolus LP solves: " << r.nucleolus.lp_solves << "\n";
  os << "time game: " << fixed(r.game_seconds, 3) << " s\n";
  os << "time nucleolus: " << fixed(r.nucleolus_seconds, 3) << " s\n";
}

}  // namespace

FullResult run_full(const Scenario& s, const FullOptions& opts) {
  validate_scenario(s);
  if (s.size() > opts.cap) throw CapExceeded(s.size(), opts.cap);
  FullResult out;
  CostEvaluator eval(s, opts.dispatch, opts.workers);
  auto t0 = Clock::now();
  out.build = build_game(eval, opts.cap);
  out.game_seconds = seconds_since(t0);
  t0 = Clock::now();
  out.nucleolus = nucleolus(out.build.game, opts.nucleolus);
  out.nucleolus_seconds = seconds_since(t0);
  const auto& x = out.nucleolus.allocation.x;
  out.stability = stability_report(x, out.build.game);
  out.efficiency_gap = std::accumulate(x.begin(), x.end(), 0.0) - out.build.game.value(out.build.game.grand());
  return out;
}

std::vector<ClusterCensus> der_census(const Scenario& s, std::span<const std::size_t> assignment, std::size_t k) {
  if (assignment.size() != s.size()) throw std::invalid_argument("der_census: assignment length mismatch");
  std::vector<ClusterCensus> out(k);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (assignment[i] >= k) throw std::out_of_range("der_census: cluster label out of range");
    auto& c = out[assignment[i]];
    ++c.prosumers;
    c.pv += s.prosumers[i].has_pv ? 1 : 0;
    c.storage += s.prosumers[i].has_storage() ? 1 : 0;
  }
  return out;
}

double der_purity(const Scenario& s, std::span<const std::size_t> assignment, std::size_t k) {
  if (assignment.size() != s.size()) throw std::invalid_argument("der_purity: assignment length mismatch");
  if (s.size() == 0) return 1.0;
  std::vector<std::array<std::size_t, 4>> counts(k, std::array<std::size_t, 4>{});
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (assignment[i] >= k) throw std::out_of_range("der_purity: cluster label out of range");
    ++counts[assignment[i]][static_cast<std::size_t>(der_type(s.prosumers[i]))];
  }
  std::size_t majority = 0;
  for (const auto& c : counts) majority += *std::max_element(c.begin(), c.end());
  return static_cast<double>(majority) / static_cast<double>(s.size());
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double mean = 0.5 * static_cast<double>(n + 1);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0.0 || sbb == 0.0) return saa == sbb ? 1.0 : 0.0;
  return sab / std::sqrt(saa * sbb);
}

DeviationStats deviation_stats(std::span<const double> reference, std::span<const double> estimate) {
  if (reference.size() != estimate.size()) throw std::invalid_argument("deviation_stats: length mismatch");
  DeviationStats st;
  const std::size_t n = reference.size();
  if (n == 0) return st;
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = estimate[i] - reference[i];
    sq += d * d;
    st.max_abs = std::max(st.max_abs, std::abs(d));
    st.mean_abs_reference += std::abs(reference[i]);
  }
  st.rms = std::sqrt(sq / static_cast<double>(n));
  st.mean_abs_reference /= static_cast<double>(n);
  st.rms_relative = st.mean_abs_reference > 0.0 ? st.rms / st.mean_abs_reference : (st.rms == 0.0 ? 0.0 : INFINITY);
  st.spearman = spearman(reference, estimate);
  return st;
}

ComparisonReport run_compare(const Scenario& s, const PipelineOptions& pipeline, const FullOptions& full) {
  ComparisonReport out;
  out.full_model = run_full(s, full);
  out.clustered_model = run_pipeline(s, pipeline);
  for (const auto& p : s.prosumers) out.ids.push_back(p.id);
  out.full = out.full_model.nucleolus.allocation.x;
  out.clustered = out.clustered_model.payoffs.allocation.x;
  out.stats = deviation_stats(out.full, out.clustered);
  return out;
}

void write_payoffs_csv(const std::filesystem::path& path, const Scenario& s, std::span<const double> payoffs,
                       std::span<const double> standalone_costs) {
  if (payoffs.size() != s.size() || standalone_costs.size() != s.size()) {
    throw std::invalid_argument("write_payoffs_csv: length mismatch");
  }
  auto os = open_out(path);
  os << "id,payoff,standalone_cost\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    os << s.prosumers[i].id << "," << num(payoffs[i]) << "," << num(standalone_costs[i]) << "\n";
  }
}

std::vector<PayoffRecord> read_payoffs_csv(const std::filesystem::path& path) {
  std::vector<PayoffRecord> out;
  for (const auto& r : read_table(path, "id,payoff,standalone_cost")) {
    out.push_back({r[0], to_double(r[1]), to_double(r[2])});
  }
  return out;
}

void write_clusters_csv(const std::filesystem::path& path, const Scenario& s, std::span<const std::size_t> assignment) {
  if (assignment.size() != s.size()) throw std::invalid_argument("write_clusters_csv: length mismatch");
  auto os = open_out(path);
  os << "id,cluster,has_pv,has_storage\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& p = s.prosumers[i];
    os << p.id << "," << (assignment[i] + 1) << "," << (p.has_pv ? 1 : 0) << "," << (p.has_storage() ? 1 : 0) << "\n";
  }
}

std::vector<ClusterRecord> read_clusters_csv(const std::filesystem::path& path) {
  std::vector<ClusterRecord> out;
  for (const auto& r : read_table(path, "id,cluster,has_pv,has_storage")) {
    out.push_back({r[0], to_size(r[1]), to_size(r[2]) != 0, to_size(r[3]) != 0});
  }
  return out;
}

void write_comparison_csv(const std::filesystem::path& path, const ComparisonReport& report) {
  const auto& assignment = report.clustered_model.selection.chosen.assignment;
  auto os = open_out(path);
  os << "id,full,clustered,difference,cluster\n";
  for (std::size_t i = 0; i < report.ids.size(); ++i) {
    os << report.ids[i] << "," << num(report.full[i]) << "," << num(report.clustered[i]) << ","
       << num(report.clustered[i] - report.full[i]) << "," << (assignment[i] + 1) << "\n";
  }
}

std::vector<ComparisonRecord> read_comparison_csv(const std::filesystem::path& path) {
  std::vector<ComparisonRecord> out;
  for (const auto& r : read_table(path, "id,full,clustered,difference,cluster")) {
    out.push_back({r[0], to_double(r[1]), to_double(r[2]), to_double(r[3]), to_size(r[4])});
  }
  return out;
}

void write_game_values(const std::filesystem::path& path, const CoalitionGame& game) {
  auto os = open_out(path);
  write_game(os, game);
}

CoalitionGame read_game_values(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_game(is);
}

std::string format_full_report(const Scenario& s, const FullResult& r, const RunInfo& info) {
  std::ostringstream os;
  os << "procoop full model\n";
  scenario_lines(os, s, info);
  full_lines(os, r);
  return os.str();
}

std::string format_clustered_report(const Scenario& s, const PipelineResult& r, const PipelineOptions& opts,
                                    const RunInfo& info) {
  std::ostringstream os;
  os << "procoop clustered model\n";
  scenario_lines(os, s, info);
  clustered_lines(os, s, r, opts);
  return os.str();
}

std::string format_comparison_report(const Scenario& s, const ComparisonReport& r, const PipelineOptions& opts,
                                     const RunInfo& info) {
  std::ostringstream os;
  os << "procoop comparison\n";
  scenario_lines(os, s, info);
  os << "\n[full model]\n";
  full_lines(os, r.full_model);
  os << "\n[clustered model]\n";
  clustered_lines(os, s, r.clustered_model, opts);
  os << "\n[deviation]\n";
  os << "RMS deviation: " << fixed(r.stats.rms) << "\n";
  os << "max abs deviation: " << fixed(r.stats.max_abs) << "\n";
  os << "mean |full payoff|: " << fixed(r.stats.mean_abs_reference) << "\n";
  os << "RMS / mean |full payoff|: " << fixed(r.stats.rms_relative, 4) << "\n";
  os << "Spearman rank correlation: " << fixed(r.stats.spearman, 4) << "\n";
  os << "LP solves full / clustered: " << r.full_model.total_lp_solves() << " / "
     << r.clustered_model.total_lp_solves() << "\n";
  return os.str();
}

}  // namespace procoop
