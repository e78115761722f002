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


// Command-line front end: full, clustered, compare, generate.
//
// Exit codes: 0 success, 1 stage failure, 2 usage error.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "procoop/bench.hpp"
#include "procoop/clustered_game.hpp"
#include "procoop/parallel.hpp"
#include "procoop/scenario_gen.hpp"
#include "procoop/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace procoop;

namespace {

struct StageFailure : std::runtime_error {
  StageFailure(std::string stage, const std::string& what) : std::runtime_error(what), stage(std::move(stage)) {}
  std::string stage;
};

struct Args {
  std::string profiles;
  std::string config;
  std::size_t synthetic = 0;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  std::string out_dir = ".";
  std::size_t cap = 20;
  bool allow_large = false;

  std::size_t k = 8;
  std::size_t runs = 1000;
  double eurelax = 0.01;
  std::string mode = "efficiency-preserving";

  double pv_fraction = 0.5;
  double es_fraction = 0.5;
};

void add_input_flags(CLI::App* cmd, Args& a) {
  cmd->add_option("--profiles", a.profiles, "Net-load profiles CSV (id,t1..tR)");
  cmd->add_option("--config", a.config, "Scenario config JSON (tariff, storage)");
  cmd->add_option("--synthetic", a.synthetic, "Use a generated scenario with this many prosumers instead of files");
  cmd->add_option("--seed", a.seed, "Master seed for generation and k-means runs")->capture_default_str();
  cmd->add_option("--workers", a.workers, "Worker threads (0: hardware concurrency)")->capture_default_str();
  cmd->add_option("--out-dir", a.out_dir, "Directory for output files")->capture_default_str();
}

void add_cap_flags(CLI::App* cmd, Args& a) {
  cmd->add_option("--cap", a.cap, "Largest game solved exhaustively")->capture_default_str();
  cmd->add_flag("--allow-large", a.allow_large, "Acknowledge the exponential cost of a cap above 20");
}

void add_cluster_flags(CLI::App* cmd, Args& a) {
  cmd->add_option("--k", a.k, "Number of clusters")->capture_default_str();
  cmd->add_option("--runs", a.runs, "K-means restarts")->capture_default_str();
  cmd->add_option("--eurelax", a.eurelax, "Relative band above the best total distance")->capture_default_str();
  cmd->add_option("--mode", a.mode, "De-clustering rule")
      ->check(CLI::IsMember({"paper-literal", "efficiency-preserving"}))
      ->capture_default_str();
}

Scenario load_input(const Args& a) {
  try {
    if (a.synthetic > 0) {
      if (!a.profiles.empty() || !a.config.empty()) {
        throw StageFailure("input", "--synthetic cannot be combined with --profiles/--config");
      }
      GeneratorConfig cfg;
      cfg.n_prosumers = a.synthetic;
      cfg.seed = a.seed;
      return generate_scenario(cfg);
    }
    if (a.profiles.empty() || a.config.empty()) {
      throw StageFailure("input", "need --profiles and --config, or --synthetic N");
    }
    return load_scenario_csv(a.profiles, a.config);
  } catch (const InvalidScenario& e) {
    throw StageFailure("validation", e.what());
  } catch (const ScenarioParseError& e) {
    throw StageFailure("input", e.what());
  }
}

RunInfo run_info(const Args& a) {
  RunInfo info;
  info.source = a.synthetic > 0 ? "synthetic, " + std::to_string(a.synthetic) + " prosumers"
                                : a.profiles + " + " + a.config;
  info.seed = a.seed;
  info.workers = a.workers == 0 ? default_workers() : a.workers;
  return info;
}

void check_cap(const Args& a) {
  if (a.cap > 20 && !a.allow_large) {
    throw StageFailure("usage", "--cap above 20 requires --allow-large");
  }
  if (a.cap > kMaxPlayers) {
    throw StageFailure("usage", "--cap may not exceed " + std::to_string(kMaxPlayers));
  }
}

fs::path out_dir(const Args& a) {
  fs::path dir(a.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw StageFailure("output", "cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw StageFailure("output", "cannot write " + path.string());
  os << text;
}

FullOptions full_options(const Args& a) {
  FullOptions o;
  o.cap = a.cap;
  o.workers = a.workers;
  return o;
}

PipelineOptions pipeline_options(const Args& a) {
  PipelineOptions o;
  o.k = a.k;
  o.selection.runs = a.runs;
  o.selection.eurelax = a.eurelax;
  o.selection.master_seed = a.seed;
  o.selection.workers = a.workers;
  o.mode = parse_decluster_mode(a.mode);
  o.cap = a.cap;
  o.workers = a.workers;
  return o;
}

FullResult full_stage(const Scenario& s, const Args& a) {
  try {
    return run_full(s, full_options(a));
  } catch (const CapExceeded& e) {
    throw StageFailure("full game", e.what());
  } catch (const NucleolusError& e) {
    throw StageFailure("nucleolus", e.what());
  } catch (const DispatchError& e) {
    throw StageFailure("dispatch", e.what());
  }
}

PipelineResult clustered_stage(const Scenario& s, const PipelineOptions& o) {
  try {
    return run_pipeline(s, o);
  } catch (const PipelineError& e) {
    std::string msg = e.what();
    const std::string prefix = e.stage() + ": ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    throw StageFailure(e.stage(), msg);
  }
}

int cmd_full(const Args& a) {
  check_cap(a);
  const Scenario s = load_input(a);
  const FullResult r = full_stage(s, a);
  const fs::path dir = out_dir(a);
  const auto& costs = r.build.game.standalone_costs();
  write_payoffs_csv(dir / "payoffs.csv", s, r.nucleolus.allocation.x, costs);
  write_game_values(dir / "game_values.csv", r.build.game);
  const std::string report = format_full_report(s, r, run_info(a));
  write_text(dir / "report.txt", report);
  std::cout << report;
  return 0;
}

int cmd_clustered(const Args& a) {
  check_cap(a);
  const Scenario s = load_input(a);
  const PipelineOptions o = pipeline_options(a);
  const PipelineResult r = clustered_stage(s, o);
  const fs::path dir = out_dir(a);
  write_payoffs_csv(dir / "payoffs.csv", s, r.payoffs.allocation.x, r.singleton_costs);
  write_clusters_csv(dir / "clusters.csv", s, r.selection.chosen.assignment);
  write_game_values(dir / "game_values.csv", r.clustered.game);
  const std::string report = format_clustered_report(s, r, o, run_info(a));
  write_text(dir / "report.txt", report);
  std::cout << report;
  return 0;
}

int cmd_compare(const Args& a) {
  check_cap(a);
  const Scenario s = load_input(a);
  const PipelineOptions o = pipeline_options(a);
  ComparisonReport r;
  // The full model runs first and on its own evaluator; nothing from the
  // clustered side feeds into it.
  r.full_model = full_stage(s, a);
  r.clustered_model = clustered_stage(s, o);
  for (const auto& p : s.prosumers) r.ids.push_back(p.id);
  r.full = r.full_model.nucleolus.allocation.x;
  r.clustered = r.clustered_model.payoffs.allocation.x;
  r.stats = deviation_stats(r.full, r.clustered);

  const fs::path dir = out_dir(a);
  write_payoffs_csv(dir / "payoffs.csv", s, r.clustered, r.clustered_model.singleton_costs);
  write_clusters_csv(dir / "clusters.csv", s, r.clustered_model.selection.chosen.assignment);
  write_game_values(dir / "game_values.csv", r.full_model.build.game);
  write_comparison_csv(dir / "comparison.csv", r);
  const std::string report = format_comparison_report(s, r, o, run_info(a));
  write_text(dir / "report.txt", report);
  std::cout << report;
  return 0;
}

int cmd_generate(const Args& a, std::size_t n) {
  GeneratorConfig cfg;
  cfg.n_prosumers = n;
  cfg.seed = a.seed;
  cfg.pv_fraction = a.pv_fraction;
  cfg.es_fraction = a.es_fraction;
  Scenario s;
  try {
    s = generate_scenario(cfg);
  } catch (const std::exception& e) {
    throw StageFailure("generate", e.what());
  }
  const fs::path dir = out_dir(a);
  write_scenario_csv(s, dir / "profiles.csv", dir / "config.json");
  const DerMixCount mix = der_mix(s);
  std::cout << "wrote " << (dir / "profiles.csv").string() << " and " << (dir / "config.json").string() << "\n"
            << "prosumers: " << s.size() << " (neither " << mix.neither << ", PV only " << mix.pv_only
            << ", storage only " << mix.storage_only << ", both " << mix.both << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative cost allocation for prosumer communities with shared storage"};
  app.require_subcommand(1);
  Args a;
  std::size_t gen_n = 10;

  auto* full = app.add_subcommand("full", "Exhaustive game and its nucleolus");
  add_input_flags(full, a);
  add_cap_flags(full, a);

  auto* clustered = app.add_subcommand("clustered", "Clustered game, nucleolus and de-clustered payoffs");
  add_input_flags(clustered, a);
  add_cap_flags(clustered, a);
  add_cluster_flags(clustered, a);

  auto* compare = app.add_subcommand("compare", "Full and clustered payoffs side by side");
  add_input_flags(compare, a);
  add_cap_flags(compare, a);
  add_cluster_flags(compare, a);

  auto* generate = app.add_subcommand("generate", "Write a synthetic scenario (profiles.csv, config.json)");
  generate->add_option("--n", gen_n, "Number of prosumers")->capture_default_str();
  generate->add_option("--seed", a.seed, "Generator seed")->capture_default_str();
  generate->add_option("--pv-fraction", a.pv_fraction, "Probability of PV")->capture_default_str();
  generate->add_option("--es-fraction", a.es_fraction, "Probability of storage")->capture_default_str();
  generate->add_option("--out-dir", a.out_dir, "Directory for output files")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*full) return cmd_full(a);
    if (*clustered) return cmd_clustered(a);
    if (*compare) return cmd_compare(a);
    return cmd_generate(a, gen_n);
  } catch (const StageFailure& e) {
    std::cerr << "error [" << e.stage << "]: " << e.what() << "\n";
    return e.stage == "usage" ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error [output]: " << e.what() << "\n";
    return 1;
  }
}
