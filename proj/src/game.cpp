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


#include "procoop/game.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace procoop {

CoalitionGame::CoalitionGame(std::size_t players, std::vector<double> values, std::vector<double> standalone_costs)
    : players_(players), values_(std::move(values)), standalone_(std::move(standalone_costs)) {
  if (players_ > kMaxPlayers) throw std::invalid_argument("CoalitionGame: too many players");
  if (values_.size() != (std::size_t{1} << players_)) {
    throw std::invalid_argument("CoalitionGame: expected " + std::to_string(std::size_t{1} << players_) +
                                " values, got " + std::to_string(values_.size()));
  }
  if (values_[0] != 0.0) throw std::invalid_argument("CoalitionGame: v(empty) must be 0");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("CoalitionGame: non-finite value");
  }
  if (!standalone_.empty() && standalone_.size() != players_) {
    throw std::invalid_argument("CoalitionGame: stand-alone cost count does not match players");
  }
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::nucleolus:
      return "nucleolus";
    case Provenance::shapley:
      return "shapley";
    case Provenance::declustered:
      return "declustered";
  }
  return "unknown";
}

CapExceeded::CapExceeded(std::size_t players, std::size_t cap)
    : std::runtime_error("exhaustive game over " + std::to_string(players) + " players exceeds the cap of " +
                         std::to_string(cap) + "; use the clustered pipeline (or raise the cap explicitly)") {}

GameBuild build_game(CostEvaluator& eval, std::size_t cap) {
  const Scenario& s = eval.scenario();
  const std::size_t n = s.size();
  if (n > cap || n > kMaxPlayers) throw CapExceeded(n, std::min(cap, kMaxPlayers));
  validate_scenario(s);

  const std::size_t count = std::size_t{1} << n;
  std::vector<Coalition> coalitions;
  coalitions.reserve(count - 1);
  for (std::size_t m = 1; m < count; ++m) coalitions.push_back(Coalition::from_mask(n, m));

  const std::size_t before = eval.lp_solves();
  const std::vector<double> solved = eval.costs(coalitions);

  GameBuild out;
  out.costs.assign(count, 0.0);
  for (std::size_t m = 1; m < count; ++m) out.costs[m] = solved[m - 1];

  std::vector<double> singles(n);
  for (std::size_t i = 0; i < n; ++i) singles[i] = out.costs[std::size_t{1} << i];

  std::vector<double> values(count, 0.0);
  for (std::size_t m = 1; m < count; ++m) {
    if (std::has_single_bit(m)) continue;  // v({i}) = 0 exactly
    double standalone = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (m >> i & 1u) standalone += singles[i];
    }
    values[m] = standalone - out.costs[m];
  }
  out.game = CoalitionGame(n, std::move(values), std::move(singles));
  out.lp_solves = eval.lp_solves() - before;
  return out;
}

GameBuild build_game(const Scenario& s, std::size_t cap, std::size_t workers, const DispatchOptions& dispatch) {
  CostEvaluator eval(s, dispatch, workers);
  return build_game(eval, cap);
}

double coalition_value(Mask s, const CoalitionGame& game) {
  if (s > game.grand()) throw std::out_of_range("coalition_value: mask outside the game");
  return game.value(s);
}

double excess(std::span<const double> x, Mask s, const CoalitionGame& game) {
  if (x.size() != game.players()) throw std::invalid_argument("excess: allocation size does not match players");
  double paid = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (s >> i & 1u) paid += x[i];
  }
  return game.value(s) - paid;
}

ImputationCheck is_imputation(std::span<const double> x, const CoalitionGame& game, double efficiency_tol,
                              double rationality_tol) {
  ImputationCheck out;
  if (x.size() != game.players()) {
    out.ok = false;
    out.violations.push_back("allocation has " + std::to_string(x.size()) + " entries for " +
                             std::to_string(game.players()) + " players");
    return out;
  }
  double total = 0.0;
  for (double xi : x) total += xi;
  const double vn = game.value(game.grand());
  if (std::abs(total - vn) > efficiency_tol) {
    std::ostringstream os;
    os << std::setprecision(10) << "efficiency: payoffs sum to " << total << " but v(N) = " << vn;
    out.violations.push_back(os.str());
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double vi = game.value(Mask{1} << i);
    if (x[i] < vi - rationality_tol) {
      std::ostringstream os;
      os << std::setprecision(10) << "individual rationality: player " << i << " receives " << x[i] << " < v({"
         << i << "}) = " << vi;
      out.violations.push_back(os.str());
    }
  }
  out.ok = out.violations.empty();
  return out;
}

StabilityReport stability_report(std::span<const double> x, const CoalitionGame& game) {
  if (x.size() != game.players()) throw std::invalid_argument("stability_report: allocation size mismatch");
  StabilityReport r;
  r.max_excess = -std::numeric_limits<double>::infinity();
  for (Mask s = game.grand() == 0 ? 0 : 1;; ++s) {
    const double e = excess(x, s, game);
    if (e > r.max_excess) {
      r.max_excess = e;
      r.argmax = s;
    }
    if (s == game.grand()) break;
  }
  return r;
}

PayoffAllocation shapley(const CoalitionGame& game) {
  const std::size_t n = game.players();
  PayoffAllocation out{std::vector<double>(n, 0.0), Provenance::shapley};
  if (n == 0) return out;
  // weight[k] = k! (n-k-1)! / n!
  std::vector<double> weight(n);
  for (std::size_t k = 0; k < n; ++k) {
    double w = 1.0 / static_cast<double>(n);
    // 1 / (n * C(n-1, k))
    double binom = 1.0;
    for (std::size_t j = 1; j <= k; ++j) binom = binom * static_cast<double>(n - 1 - k + j) / static_cast<double>(j);
    weight[k] = w / binom;
  }
  const Mask grand = game.grand();
  for (std::size_t i = 0; i < n; ++i) {
    const Mask bit = Mask{1} << i;
    double phi = 0.0;
    for (Mask s = 0; s <= grand; ++s) {
      if (s & bit) continue;
      phi += weight[static_cast<std::size_t>(std::popcount(s))] * (game.value(s | bit) - game.value(s));
      if (s == grand) break;
    }
    out.x[i] = phi;
  }
  return out;
}

void write_game(std::ostream& os, const CoalitionGame& game) {
  os << "players=" << game.players() << '\n';
  os << std::setprecision(17);
  for (std::size_t m = 0; m < game.values().size(); ++m) os << m << ',' << game.values()[m] << '\n';
}

CoalitionGame read_game(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t players = SIZE_MAX;
  std::vector<double> values;
  std::vector<bool> seen;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("game file line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (players == SIZE_MAX) {
      if (line.rfind("players=", 0) != 0) fail("expected 'players=N' header");
      try {
        players = std::stoul(line.substr(8));
      } catch (const std::exception&) {
        fail("bad player count");
      }
      if (players > kMaxPlayers) fail("too many players");
      values.assign(std::size_t{1} << players, 0.0);
      seen.assign(values.size(), false);
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail("expected 'mask,value'");
    std::size_t mask = 0;
    double v = 0.0;
    try {
      std::size_t used = 0;
      mask = std::stoul(line.substr(0, comma), &used);
      const std::string rest = line.substr(comma + 1);
      v = std::stod(rest, &used);
      if (used != rest.size()) fail("trailing characters after value");
    } catch (const std::invalid_argument&) {
      fail("unparsable mask or value");
    } catch (const std::out_of_range&) {
      fail("mask or value out of range");
    }
    if (mask >= values.size()) fail("mask outside the game");
    if (seen[mask]) fail("duplicate mask " + std::to_string(mask));
    seen[mask] = true;
    values[mask] = v;
  }
  if (players == SIZE_MAX) throw std::runtime_error("game file: missing 'players=N' header");
  for (std::size_t m = 1; m < values.size(); ++m) {
    if (!seen[m]) throw std::runtime_error("game file: no value for mask " + std::to_string(m));
  }
  return CoalitionGame(players, std::move(values));
}

}  // namespace procoop
