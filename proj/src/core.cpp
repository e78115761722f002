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

#include "procoop/core.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace procoop {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t universe) { return (universe + kWordBits - 1) / kWordBits; }

std::string join_lines(const std::vector<std::string>& lines) {
  std::ostringstream os;
  os << "invalid scenario (" << lines.size() << " violation" << (lines.size() == 1 ? "" : "s") << ")";
  for (const auto& l : lines) os << "\n  - " << l;
  return os.str();
}

void check_storage(const Prosumer& p, std::vector<std::string>& out) {
  const StorageSpec& st = p.storage;
  auto bad = [&](const std::string& what) { out.push_back("prosumer '" + p.id + "': " + what); };
  const double fields[] = {st.capacity, st.charge_limit, st.discharge_limit, st.eff_in,
                           st.eff_out,  st.soc0,         st.soc_min,         st.soc_max};
  for (double f : fields) {
    if (!std::isfinite(f)) {
      bad("storage parameters must be finite");
      return;
    }
  }
  if (st.capacity < 0.0) bad("storage capacity is negative");
  if (st.charge_limit < 0.0) bad("charge limit must be >= 0");
  if (st.discharge_limit > 0.0) bad("discharge limit must be <= 0");
  if (!(st.eff_in > 0.0 && st.eff_in <= 1.0)) bad("charge efficiency must lie in (0, 1]");
  if (!(st.eff_out > 0.0 && st.eff_out <= 1.0)) bad("discharge efficiency must lie in (0, 1]");
  for (double f : {st.soc0, st.soc_min, st.soc_max}) {
    if (f < 0.0 || f > 1.0) {
      bad("state-of-charge fractions must lie in [0, 1]");
      break;
    }
  }
  if (!(st.soc_min <= st.soc0 && st.soc0 <= st.soc_max)) {
    std::ostringstream os;
    os << "state-of-charge bounds inconsistent: need soc_min <= soc0 <= soc_max, got " << st.soc_min << " <= "
       << st.soc0 << " <= " << st.soc_max;
    bad(os.str());
  }
}

}  // namespace

Coalition::Coalition(std::size_t universe) : universe_(universe), words_(word_count(universe), 0) {}

Coalition Coalition::grand(std::size_t universe) {
  Coalition c(universe);
  for (std::size_t i = 0; i < universe; ++i) c.insert(i);
  return c;
}

Coalition Coalition::from_members(std::size_t universe, std::span<const std::size_t> members) {
  Coalition c(universe);
  for (std::size_t i : members) c.insert(i);
  return c;
}

Coalition Coalition::from_mask(std::size_t universe, std::uint64_t mask) {
  if (universe > kWordBits) throw std::invalid_argument("Coalition::from_mask: universe exceeds 64 players");
  if (universe < kWordBits && (mask >> universe) != 0) {
    throw std::out_of_range("Coalition::from_mask: mask has bits outside the universe");
  }
  Coalition c(universe);
  if (!c.words_.empty()) c.words_[0] = mask;
  return c;
}

std::uint64_t Coalition::to_mask() const {
  if (universe_ > kWordBits) throw std::logic_error("Coalition::to_mask: universe exceeds 64 players");
  return words_.empty() ? 0 : words_[0];
}

bool Coalition::contains(std::size_t i) const {
  if (i >= universe_) return false;
  return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
}

void Coalition::insert(std::size_t i) {
  if (i >= universe_) throw std::out_of_range("Coalition::insert: index outside the universe");
  words_[i / kWordBits] |= std::uint64_t{1} << (i % kWordBits);
}

void Coalition::erase(std::size_t i) {
  if (i >= universe_) return;
  words_[i / kWordBits] &= ~(std::uint64_t{1} << (i % kWordBits));
}

std::size_t Coalition::size() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<std::size_t> Coalition::members() const {
  std::vector<std::size_t> out;
  out.reserve(size());
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      out.push_back(w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

bool Coalition::disjoint(const Coalition& other) const {
  const std::size_t n = std::min(words_.size(), other.words_.size());
  for (std::size_t w = 0; w < n; ++w) {
    if (words_[w] & other.words_[w]) return false;
  }
  return true;
}

Coalition Coalition::operator|(const Coalition& other) const {
  if (universe_ != other.universe_) throw std::invalid_argument("Coalition union over different universes");
  Coalition c = *this;
  for (std::size_t w = 0; w < words_.size(); ++w) c.words_[w] |= other.words_[w];
  return c;
}

std::size_t Coalition::hash() const {
  std::size_t h = std::hash<std::size_t>{}(universe_);
  for (auto w : words_) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

InvalidScenario::InvalidScenario(std::vector<std::string> violations)
    : std::runtime_error(join_lines(violations)), violations_(std::move(violations)) {}

std::vector<std::string> find_violations(const Scenario& s) {
  std::vector<std::string> out;
  const std::size_t R = s.horizon;
  if (R < 1) out.push_back("horizon must be at least one interval");
  if (!(s.interval_hours > 0.0) || !std::isfinite(s.interval_hours)) out.push_back("interval length must be positive");

  std::unordered_set<std::string> seen;
  for (const Prosumer& p : s.prosumers) {
    if (p.id.empty()) out.push_back("prosumer with empty id");
    if (!seen.insert(p.id).second) out.push_back("duplicate prosumer id '" + p.id + "'");
    if (p.net_load.size() != R) {
      out.push_back("prosumer '" + p.id + "': net load has " + std::to_string(p.net_load.size()) +
                    " values, expected " + std::to_string(R));
    }
    for (std::size_t t = 0; t < p.net_load.size(); ++t) {
      if (!std::isfinite(p.net_load[t])) {
        out.push_back("prosumer '" + p.id + "': non-finite net load at t=" + std::to_string(t + 1));
        break;
      }
    }
    check_storage(p, out);
  }

  const auto& tb = s.tariff.import_price;
  const auto& ts = s.tariff.export_price;
  if (tb.size() != R) {
    out.push_back("tariff: import price has " + std::to_string(tb.size()) + " values, expected " + std::to_string(R));
  }
  if (ts.size() != R) {
    out.push_back("tariff: export price has " + std::to_string(ts.size()) + " values, expected " + std::to_string(R));
  }
  for (std::size_t t = 0; t < std::min(tb.size(), ts.size()); ++t) {
    if (!std::isfinite(tb[t]) || !std::isfinite(ts[t])) {
      out.push_back("tariff: non-finite price at t=" + std::to_string(t + 1));
      continue;
    }
    if (ts[t] < 0.0) out.push_back("tariff: negative export price at t=" + std::to_string(t + 1));
    if (ts[t] > tb[t]) {
      std::ostringstream os;
      os << "tariff: export price " << ts[t] << " exceeds import price " << tb[t] << " at t=" << (t + 1);
      out.push_back(os.str());
    }
  }
  return out;
}

const Scenario& validate_scenario(const Scenario& s) {
  auto v = find_violations(s);
  if (!v.empty()) throw InvalidScenario(std::move(v));
  return s;
}

}  // namespace procoop
