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


/// \file procoop/game.hpp
///
/// Transferable-utility cooperative games over at most `kMaxPlayers`
/// players, with values indexed by coalition bitmask, and the allocation
/// rules used on them.

#ifndef PROCOOP_GAME_HPP
#define PROCOOP_GAME_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "procoop/cost_evaluator.hpp"
#include "procoop/core.hpp"
#include "procoop/dispatch.hpp"

namespace procoop {

using Mask = std::uint32_t;

inline constexpr std::size_t kMaxPlayers = 30;

/// v(S) for every S given as a bitmask, plus the stand-alone cost of each
/// player (for a prosumer game, C({i}); for a clustered game, the summed
/// stand-alone cost of the cluster's members).
class CoalitionGame {
 public:
  CoalitionGame() = default;
  CoalitionGame(std::size_t players, std::vector<double> values, std::vector<double> standalone_costs = {});

  std::size_t players() const { return players_; }
  Mask grand() const { return players_ == 0 ? 0 : static_cast<Mask>((std::uint64_t{1} << players_) - 1); }
  double value(Mask s) const { return values_.at(s); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& standalone_costs() const { return standalone_; }

 private:
  std::size_t players_ = 0;
  std::vector<double> values_;
  std::vector<double> standalone_;
};

enum class Provenance { nucleolus, shapley, declustered };

std::string to_string(Provenance p);

struct PayoffAllocation {
  std::vector<double> x;
  Provenance provenance = Provenance::nucleolus;
};

/// Raised when an exhaustive game would exceed the configured player cap.
class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(std::size_t players, std::size_t cap);
};

struct GameBuild {
  CoalitionGame game;
  /// C(S) per mask; entry 0 is the empty coalition.
  std::vector<double> costs;
  std::size_t lp_solves = 0;
};

/// Prosumer-level game v(S) = sum_{i in S} C({i}) - C(S), evaluated through
/// `eval` (which must wrap the scenario to use). Solves one dispatch program
/// per nonempty coalition that `eval` has not seen before.
GameBuild build_game(CostEvaluator& eval, std::size_t cap = 20);

/// Convenience overload with a private evaluator.
GameBuild build_game(const Scenario& s, std::size_t cap = 20, std::size_t workers = 0,
                     const DispatchOptions& dispatch = {});

double coalition_value(Mask s, const CoalitionGame& game);

/// v(S) - sum_{i in S} x_i.
double excess(std::span<const double> x, Mask s, const CoalitionGame& game);

struct ImputationCheck {
  bool ok = true;
  std::vector<std::string> violations;
  explicit operator bool() const { return ok; }
};

ImputationCheck is_imputation(std::span<const double> x, const CoalitionGame& game, double efficiency_tol = 1e-6,
                              double rationality_tol = 1e-9);

struct StabilityReport {
  double max_excess = 0.0;
  Mask argmax = 0;
};

/// Largest excess over all 2^n coalitions (ties resolved to the smallest mask).
StabilityReport stability_report(std::span<const double> x, const CoalitionGame& game);

/// Exact Shapley value via size-weighted marginal contributions.
PayoffAllocation shapley(const CoalitionGame& game);

struct NucleolusOptions {
  /// Multipliers above this mark a coalition as tight at the round optimum.
  double dual_threshold = 1e-9;
  /// Bound shift used by the re-solve tightness check.
  double perturbation = 1e-6;
  lp::Options lp;
};

struct NucleolusResult {
  PayoffAllocation allocation;
  std::size_t rounds = 0;
  /// Every LP solved, including tightness re-solves.
  std::size_t lp_solves = 0;
  /// Optimal maximum excess of each round.
  std::vector<double> round_excess;
};

class NucleolusError : public std::runtime_error {
 public:
  NucleolusError(std::size_t round, const std::string& what);
  std::size_t round() const { return round_; }

 private:
  std::size_t round_;
};

/// Nucleolus by sequential linear programs: each round minimizes the largest
/// excess among coalitions not yet fixed, then fixes the coalitions that are
/// tight in every optimum, until the fixed equalities pin x down.
NucleolusResult nucleolus(const CoalitionGame& game, const NucleolusOptions& opts = {});

/// Text form: a `players=N` header followed by one `mask,value` line per
/// coalition. Lines starting with '#' are ignored.
void write_game(std::ostream& os, const CoalitionGame& game);
CoalitionGame read_game(std::istream& is);

}  // namespace procoop

#endif  // PROCOOP_GAME_HPP
