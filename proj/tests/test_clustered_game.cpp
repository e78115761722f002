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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "procoop/clustered_game.hpp"
#include "procoop/scenario_gen.hpp"
#include "support.hpp"

using namespace procoop;

namespace {

Scenario generated(std::size_t n, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.n_prosumers = n;
  cfg.seed = seed;
  return generate_scenario(cfg);
}

PipelineOptions quick(std::size_t k, std::uint64_t seed = 1) {
  PipelineOptions o;
  o.k = k;
  o.selection.runs = 100;
  o.selection.master_seed = seed;
  o.workers = 1;
  return o;
}

}  // namespace

TEST_CASE("grand dispatch") {
  SUBCASE("no storage: schedule is zero and cost is the tariff applied to the net load") {
    const Scenario s = support::scenario({{1.0, -2.0}, {0.5, 0.5}}, {0.2, 0.3}, {0.05, 0.1});
    CostEvaluator eval(s);
    const auto g = grand_dispatch(eval);
    for (const auto& row : g.schedule) {
      for (double b : row) CHECK(b == 0.0);
    }
    CHECK(g.cost == doctest::Approx(1.5 * 0.2 - 1.5 * 0.1));
  }
  SUBCASE("one prosumer: same as its stand-alone cost") {
    const Scenario s = support::flat({{1.0, 0.2, -0.5, 0.8}}, 0.2, 0.05, {support::battery(1.0, 0.5, -0.5, 0.9, 0.5)});
    CostEvaluator eval(s);
    CHECK(grand_dispatch(eval).cost == doctest::Approx(individual_cost(0, s)).epsilon(1e-12));
  }
  SUBCASE("complementary pair costs nothing") {
    const Scenario s = support::flat({{1.0, 2.0}, {-1.0, -2.0}}, 0.2, 0.05);
    CostEvaluator eval(s);
    CHECK(grand_dispatch(eval).cost == doctest::Approx(0.0));
  }
}

TEST_CASE("post-dispatch profiles") {
  SUBCASE("no battery activity leaves the loads unchanged") {
    const Scenario s = support::flat({{1.0, -2.0}, {0.5, 0.25}}, 0.2, 0.05);
    CostEvaluator eval(s);
    const ProfileMatrix m = post_dispatch_profiles(s, grand_dispatch(eval));
    CHECK(m(0, 0) == 1.0);
    CHECK(m(0, 1) == -2.0);
    CHECK(m(1, 0) == 0.5);
    CHECK(m(1, 1) == 0.25);
  }
  SUBCASE("zero load: the profile is the battery schedule") {
    const Scenario s = support::flat({{0.0, 0.0}}, 0.2, 0.05);
    DispatchSolution d;
    d.members = {0};
    d.schedule = {{0.7, -0.7}};
    const ProfileMatrix m = post_dispatch_profiles(s, d);
    CHECK(m(0, 0) == 0.7);
    CHECK(m(0, 1) == -0.7);
  }
  SUBCASE("generated scenario rows equal load plus schedule") {
    const Scenario s = generated(6, 2);
    CostEvaluator eval(s);
    const auto g = grand_dispatch(eval);
    const ProfileMatrix m = post_dispatch_profiles(s, g);
    REQUIRE(m.rows() == 6);
    REQUIRE(m.cols() == kDayIntervals);
    for (std::size_t pos = 0; pos < g.members.size(); ++pos) {
      const std::size_t i = g.members[pos];
      for (std::size_t t = 0; t < s.horizon; t += 7) CHECK(m(i, t) == s.prosumers[i].net_load[t] + g.schedule[pos][t]);
    }
  }
  SUBCASE("shape mismatch is rejected") {
    const Scenario s = support::flat({{0.0, 0.0}, {1.0, 1.0}}, 0.2, 0.05);
    DispatchSolution d;
    d.members = {0};
    d.schedule = {{0.0, 0.0}};
    CHECK_THROWS_AS(post_dispatch_profiles(s, d), std::invalid_argument);
  }
}

TEST_CASE("clustered scenario validation") {
  const Scenario s = support::flat({{1.0}, {1.0}, {1.0}}, 0.2, 0.05);
  CHECK_THROWS_AS(ClusteredScenario(s, {0, 1}, 2), std::invalid_argument);
  CHECK_THROWS_AS(ClusteredScenario(s, {0, 2, 1}, 2), std::invalid_argument);
  CHECK_THROWS_AS(ClusteredScenario(s, {0, 0, 0}, 2), std::invalid_argument);
  const ClusteredScenario cs(s, {1, 0, 1}, 2);
  CHECK(cs.members(0) == std::vector<std::size_t>{1});
  CHECK(cs.members(1) == std::vector<std::size_t>{0, 2});
  CHECK(cs.prosumers_of(0b10).members() == std::vector<std::size_t>{0, 2});
  CHECK(cs.prosumers_of(0b11).size() == 3);
}

TEST_CASE("clustered game") {
  const Scenario s = generated(6, 4);
  const GameBuild full = build_game(s, 20, 1);

  SUBCASE("one cluster holds the grand value") {
    const ClusteredScenario cs(s, std::vector<std::size_t>(6, 0), 1);
    CostEvaluator eval(s, {}, 1);
    const auto b = build_clustered_game(cs, eval);
    CHECK(b.game.players() == 1);
    CHECK(b.game.value(1) == doctest::Approx(full.game.value(full.game.grand())).epsilon(1e-9));
  }
  SUBCASE("singleton clusters reproduce the prosumer game") {
    const ClusteredScenario cs(s, {0, 1, 2, 3, 4, 5}, 6);
    CostEvaluator eval(s, {}, 1);
    const auto b = build_clustered_game(cs, eval);
    for (Mask m = 0; m <= full.game.grand(); ++m) {
      CHECK(b.game.value(m) == doctest::Approx(full.game.value(m)).epsilon(1e-9));
    }
    CHECK(b.lp_solves == 63 + 0);
  }
  SUBCASE("permuted singleton clusters permute the game") {
    const std::vector<std::size_t> perm{3, 5, 0, 1, 4, 2};
    const ClusteredScenario cs(s, perm, 6);
    CostEvaluator eval(s, {}, 1);
    const auto b = build_clustered_game(cs, eval);
    for (Mask m = 0; m <= full.game.grand(); ++m) {
      Mask pm = 0;
      for (std::size_t i = 0; i < 6; ++i) {
        if (m >> i & 1u) pm |= Mask{1} << perm[i];
      }
      CHECK(b.game.value(pm) == doctest::Approx(full.game.value(m)).epsilon(1e-9));
    }
  }
  SUBCASE("cap") {
    const ClusteredScenario cs(s, {0, 1, 2, 3, 4, 5}, 6);
    CostEvaluator eval(s, {}, 1);
    CHECK_THROWS_AS(build_clustered_game(cs, eval, 5), CapExceeded);
  }
}

TEST_CASE("a cluster holding a complementary pair has positive stand-alone value") {
  // p1 imports 1, p2 exports 1 at 0.2 / 0.05: together 0, apart 0.2 - 0.05.
  const Scenario s = support::flat({{1.0}, {-1.0}, {1.0}}, 0.2, 0.05);
  const ClusteredScenario cs(s, {0, 0, 1}, 2);
  CostEvaluator eval(s, {}, 1);
  const auto b = build_clustered_game(cs, eval);
  CHECK(b.game.value(0b01) == doctest::Approx(0.15));
  CHECK(b.game.value(0b10) == doctest::Approx(0.0));
  CHECK(b.game.value(0b11) == doctest::Approx(0.15));
  CHECK(b.game.standalone_costs()[0] == doctest::Approx(0.15));
  CHECK(b.game.standalone_costs()[1] == doctest::Approx(0.2));
}

TEST_CASE("de-clustering") {
  const Scenario s2 = support::flat({{1.0}, {1.0}}, 0.2, 0.05);
  const ClusteredScenario one(s2, {0, 0}, 1);
  const CoalitionGame g1(1, {0.0, 0.5});
  const std::vector<double> u{2.0};
  const std::vector<double> costs{1.0, -3.0};

  SUBCASE("paper-literal adds the cluster's own value") {
    const auto r = decluster_payoffs(u, g1, costs, one, DeclusterMode::paper_literal);
    CHECK(r.cluster_amounts[0] == doctest::Approx(2.5));
    CHECK(r.allocation.x[0] == doctest::Approx(0.625));
    CHECK(r.allocation.x[1] == doctest::Approx(1.875));
    CHECK(r.allocation.provenance == Provenance::declustered);
    CHECK(r.equal_split_clusters.empty());
  }
  SUBCASE("efficiency-preserving hands out the nucleolus share only") {
    const auto r = decluster_payoffs(u, g1, costs, one, DeclusterMode::efficiency_preserving);
    CHECK(r.allocation.x[0] == doctest::Approx(0.5));
    CHECK(r.allocation.x[1] == doctest::Approx(1.5));
  }
  SUBCASE("singleton cluster member receives everything") {
    const ClusteredScenario two(s2, {1, 0}, 2);
    const CoalitionGame g2(2, {0.0, 0.0, 0.0, 1.0});
    const std::vector<double> u2{0.3, 0.7};
    const auto r = decluster_payoffs(u2, g2, costs, two, DeclusterMode::efficiency_preserving);
    CHECK(r.allocation.x[1] == 0.3);
    CHECK(r.allocation.x[0] == 0.7);
  }
  SUBCASE("all-zero stand-alone costs fall back to an equal split") {
    const std::vector<double> zero{0.0, 0.0};
    const auto r = decluster_payoffs(u, g1, zero, one, DeclusterMode::efficiency_preserving);
    CHECK(r.allocation.x[0] == 1.0);
    CHECK(r.allocation.x[1] == 1.0);
    CHECK(r.equal_split_clusters == std::vector<std::size_t>{0});
  }
  SUBCASE("size mismatches are rejected") {
    const std::vector<double> three{1.0, 1.0, 1.0};
    CHECK_THROWS_AS(decluster_payoffs(u, g1, three, one, DeclusterMode::paper_literal), std::invalid_argument);
    const std::vector<double> u2{1.0, 1.0};
    CHECK_THROWS_AS(decluster_payoffs(u2, g1, costs, one, DeclusterMode::paper_literal), std::invalid_argument);
  }
}

TEST_CASE("mode names") {
  CHECK(parse_decluster_mode("paper-literal") == DeclusterMode::paper_literal);
  CHECK(parse_decluster_mode("efficiency-preserving") == DeclusterMode::efficiency_preserving);
  CHECK(to_string(DeclusterMode::paper_literal) == "paper-literal");
  CHECK_THROWS_AS(parse_decluster_mode("literal"), std::invalid_argument);
}

TEST_CASE("pipeline with one cluster per prosumer matches the full model") {
  const Scenario s = generated(6, 7);
  const auto full = nucleolus(build_game(s, 20, 1).game);
  const auto r = run_pipeline(s, quick(6));
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(r.payoffs.allocation.x[i] == doctest::Approx(full.allocation.x[i]).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("pipeline on eight prosumers in four clusters") {
  const Scenario s = generated(8, 3);
  const auto r = run_pipeline(s, quick(4));
  const auto& g = r.clustered.game;
  const auto& u = r.cluster_nucleolus.allocation.x;

  // distinct prosumer sets requested: the grand coalition, singletons and
  // every nonempty union of clusters
  std::set<std::vector<std::size_t>> distinct;
  std::vector<std::size_t> all(8);
  for (std::size_t i = 0; i < 8; ++i) {
    all[i] = i;
    distinct.insert({i});
  }
  distinct.insert(all);
  const ClusteredScenario cs(s, r.selection.chosen.assignment, 4);
  for (Mask m = 1; m < 16; ++m) distinct.insert(cs.prosumers_of(m).members());

  CHECK(r.dispatch_lp_solves == distinct.size());
  CHECK(r.dispatch_lp_solves == r.expected_dispatch_lp_solves());
  CHECK(r.dispatch_lp_solves < 256);
  CHECK(r.nucleolus_lp_solves == r.cluster_nucleolus.lp_solves);

  double sum_u = 0.0, sum_single = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(u[j] >= g.value(Mask{1} << j) - 1e-9);
    CHECK(r.cluster_singleton_values[j] == g.value(Mask{1} << j));
    sum_u += u[j];
    sum_single += r.cluster_singleton_values[j];
  }
  CHECK(sum_u == doctest::Approx(g.value(g.grand())).epsilon(1e-9));
  double sum_x = 0.0;
  for (double x : r.payoffs.allocation.x) sum_x += x;
  CHECK(sum_x == doctest::Approx(g.value(g.grand())).epsilon(1e-6));
  CHECK(r.total_efficiency_preserving == doctest::Approx(g.value(g.grand())).epsilon(1e-6));
  CHECK(r.total_paper_literal == doctest::Approx(g.value(g.grand()) + sum_single).epsilon(1e-6));

  // in-cluster shares follow |C({i})|
  for (std::size_t j = 0; j < 4; ++j) {
    double base = 0.0, handed = 0.0;
    for (std::size_t i : cs.members(j)) {
      base += std::abs(r.singleton_costs[i]);
      handed += r.payoffs.allocation.x[i];
    }
    CHECK(handed == doctest::Approx(u[j]).epsilon(1e-9));
    for (std::size_t i : cs.members(j)) {
      CHECK(r.payoffs.allocation.x[i] == doctest::Approx(u[j] * std::abs(r.singleton_costs[i]) / base));
    }
  }

  bool all_nonneg = std::all_of(u.begin(), u.end(), [](double v) { return v >= 0.0; });
  if (all_nonneg) {
    for (double x : r.payoffs.allocation.x) CHECK(x >= 0.0);
  }
}

TEST_CASE("paper-literal mode distributes the cluster singleton values on top") {
  const Scenario s = generated(8, 3);
  PipelineOptions o = quick(4);
  o.mode = DeclusterMode::paper_literal;
  const auto r = run_pipeline(s, o);
  double sum_x = 0.0;
  for (double x : r.payoffs.allocation.x) sum_x += x;
  CHECK(sum_x == doctest::Approx(r.total_paper_literal));
  CHECK(r.mode == DeclusterMode::paper_literal);
}

TEST_CASE("pipeline results do not depend on the worker count") {
  const Scenario s = generated(9, 12);
  PipelineOptions o = quick(3, 5);
  const auto a = run_pipeline(s, o);
  o.workers = 2;
  const auto b = run_pipeline(s, o);
  CHECK(a.selection.chosen.assignment == b.selection.chosen.assignment);
  CHECK(a.payoffs.allocation.x == b.payoffs.allocation.x);
  CHECK(a.dispatch_lp_solves == b.dispatch_lp_solves);
}

TEST_CASE("pipeline failures name their stage") {
  const Scenario s = generated(5, 1);
  auto stage_of = [](const Scenario& sc, const PipelineOptions& o) -> std::string {
    try {
      run_pipeline(sc, o);
    } catch (const PipelineError& e) {
      return e.stage();
    }
    return "";
  };
  Scenario bad = s;
  bad.tariff.export_price[3] = 1.0;
  CHECK(stage_of(bad, quick(2)) == "validation");
  CHECK(stage_of(s, quick(0)) == "clustering");
  CHECK(stage_of(s, quick(6)) == "clustering");
  PipelineOptions capped = quick(4);
  capped.cap = 3;
  CHECK(stage_of(s, capped) == "clustered game");
}
