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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "fpensemble/token.hpp"

namespace fpensemble {

using ModelIndex = std::size_t;

struct TokenProb {
  Token token;
  double prob = 0.0;

  friend bool operator==(const TokenProb&, const TokenProb&) = default;
};

/// One member's top-K next-token candidates, descending by probability.
/// Probabilities are the member's raw next-token probabilities; the list is
/// truncated, never renormalized.
struct TopKDistribution {
  ModelIndex model_id = 0;
  std::vector<TokenProb> entries;

  std::size_t k() const noexcept { return entries.size(); }
  TokenSet tokens() const;
  std::optional<double> prob_of(const Token& t) const;

  friend bool operator==(const TopKDistribution&, const TopKDistribution&) = default;
};

/// A member's distribution restricted to the unified set V_U: original
/// probability where the member proposed the token, 0 where it did not.
/// The key set of `probs` is the support.
struct AlignedDistribution {
  ModelIndex model_id = 0;
  std::map<Token, double> probs;

  TokenSet support() const;
};

/// Mean of the aligned distributions over V_U (not renormalized).
struct UnifiedDistribution {
  std::map<Token, double> probs;

  TokenSet support() const;
};

// Throws DuplicateToken, UnsortedProbabilities, ProbabilityMassExceedsOne or
// EmptyDistribution; returns the argument unchanged otherwise.
TopKDistribution validate_topk(TopKDistribution d);
void check_topk(const TopKDistribution& d);

/// Sort descending by probability, ties by token byte order.
void rank_entries(std::vector<TokenProb>& entries);

/// Ranks `entries` and keeps the first `k`.
std::vector<TokenProb> top_k_of(std::vector<TokenProb> entries, std::size_t k);

/// Sums probabilities of entries sharing a surface, then ranks.
std::vector<TokenProb> merge_duplicate_tokens(std::vector<TokenProb> entries);

/// Probability rounded to 12 decimal digits, as an integer, for tie-breaks.
std::int64_t tie_key(double p) noexcept;

}  // namespace fpensemble
