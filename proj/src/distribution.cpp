// Copyright 2026 The fpensemble Authors
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

#include "fpensemble/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "fpensemble/error.hpp"

namespace fpensemble {

TokenSet TopKDistribution::tokens() const {
  TokenSet out;
  for (const auto& e : entries) out.insert(e.token);
  return out;
}

std::optional<double> TopKDistribution::prob_of(const Token& t) const {
  for (const auto& e : entries)
    if (e.token == t) return e.prob;
  return std::nullopt;
}

TokenSet AlignedDistribution::support() const {
  TokenSet out;
  for (const auto& [t, p] : probs) out.insert(t);
  return out;
}

TokenSet UnifiedDistribution::support() const {
  TokenSet out;
  for (const auto& [t, p] : probs) out.insert(t);
  return out;
}

void check_topk(const TopKDistribution& d) {
  if (d.entries.empty()) throw Error(Errc::empty_distribution, "top-k distribution has no entries");
  TokenSet seen;
  double mass = 0.0;
  for (std::size_t i = 0; i < d.entries.size(); ++i) {
    const auto& e = d.entries[i];
    if (e.token.empty()) throw Error(Errc::invalid_argument, "empty token surface");
    if (!std::isfinite(e.prob) || e.prob < 0.0 || e.prob > 1.0)
      throw Error(Errc::invalid_argument, "probability outside [0,1] for '" + e.token.surface + "'");
    if (!seen.insert(e.token).second)
      throw Error(Errc::duplicate_token, "duplicate token '" + e.token.surface + "'");
    if (i > 0 && e.prob > d.entries[i - 1].prob)
      throw Error(Errc::unsorted_probabilities,
                  "entry " + std::to_string(i) + " exceeds its predecessor");
    mass += e.prob;
  }
  if (mass > 1.0 + 1e-9)
    throw Error(Errc::probability_mass_exceeds_one, "total mass " + std::to_string(mass));
}

TopKDistribution validate_topk(TopKDistribution d) {
  check_topk(d);
  return d;
}

void rank_entries(std::vector<TokenProb>& entries) {
  std::sort(entries.begin(), entries.end(), [](const TokenProb& a, const TokenProb& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    return a.token < b.token;
  });
}

std::vector<TokenProb> top_k_of(std::vector<TokenProb> entries, std::size_t k) {
  rank_entries(entries);
  if (entries.size() > k) entries.resize(k);
  return entries;
}

std::vector<TokenProb> merge_duplicate_tokens(std::vector<TokenProb> entries) {
  std::map<Token, double> merged;
  for (auto& e : entries) merged[std::move(e.token)] += e.prob;
  std::vector<TokenProb> out;
  out.reserve(merged.size());
  for (auto& [t, p] : merged) out.push_back({t, p});
  rank_entries(out);
  return out;
}

std::int64_t tie_key(double p) noexcept { return std::llround(p * 1e12); }

}  // namespace fpensemble
