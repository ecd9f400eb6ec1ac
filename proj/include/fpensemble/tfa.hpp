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

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpensemble/distribution.hpp"
#include "fpensemble/ensemble.hpp"

namespace fpensemble::tfa {

struct TfaConfig {
  std::size_t top_k_filter = 20;
  std::size_t max_new_tokens = 50;
  // Temperature at which members report their top-K; 1.0 is the raw model.
  double extraction_temperature = 1.0;
  // Query members in parallel within a step (useful for remote members).
  bool concurrent_queries = false;
};

void validate(const TfaConfig& cfg);

/// V_U: union over every unordered member pair of their top-K intersection,
/// or of their union when that intersection is empty.
TokenSet pairwise_filter(std::span<const TopKDistribution> dists);

/// The member's probabilities restricted to V_U, zero-filled for tokens the
/// member did not propose; tokens outside V_U are dropped.
AlignedDistribution align(const TopKDistribution& d, const TokenSet& v_u);

/// Per-token mean over members (divided by N, not renormalized).
UnifiedDistribution aggregate(std::span<const AlignedDistribution> aligned);

/// Argmax of P_U; ties (12-digit rounding) go to the primary's aligned
/// probability, then to byte order.
Token select(const UnifiedDistribution& p_u, const AlignedDistribution& primary_aligned);

struct StepTrace {
  std::string method = "tfa";
  std::size_t step = 0;
  std::vector<TopKDistribution> per_model_topk;
  TokenSet v_u;
  UnifiedDistribution p_u;
  Token chosen;
};

nlohmann::json to_json(const StepTrace& trace);

using StepObserver = std::function<void(const StepTrace&)>;
using UnifiedSetBuilder = std::function<TokenSet(std::span<const TopKDistribution>)>;

/// Queries every member for its top-K after `context` and stamps model ids.
std::vector<TopKDistribution> collect_topk(const EnsembleSpec& ensemble, std::string_view context,
                                           const TfaConfig& cfg);

/// One filter -> align -> aggregate -> select step over `dists`.
StepTrace decide(const EnsembleSpec& ensemble, std::vector<TopKDistribution> dists,
                 const UnifiedSetBuilder& build_unified_set);

/// The token-level ensemble loop with a pluggable unified-set builder.
/// Every member re-reads the full running text each step; stops on "<END>"
/// or after max_new_tokens. Returns the continuation only.
std::string ensemble_decode(const EnsembleSpec& ensemble, std::string_view prompt,
                            const TfaConfig& cfg, const UnifiedSetBuilder& build_unified_set,
                            std::string_view method, const StepObserver& observer = {});

std::string decode(const EnsembleSpec& ensemble, std::string_view prompt, const TfaConfig& cfg,
                   const StepObserver& observer = {});

/// The token TFA would emit next after `context`.
Token next_token(const EnsembleSpec& ensemble, std::string_view context, const TfaConfig& cfg);

}  // namespace fpensemble::tfa
