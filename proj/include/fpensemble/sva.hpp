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

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpensemble/ensemble.hpp"

namespace fpensemble::sva {

struct CandidateResponse {
  ModelIndex model_id = 0;
  std::string text;
  std::uint64_t seed_used = 0;

  friend bool operator==(const CandidateResponse&, const CandidateResponse&) = default;
};

struct PerplexityScore {
  ModelIndex scorer_id = 0;
  ModelIndex candidate_id = 0;
  double ppl = 0.0;     // +inf for an empty candidate
  double lg_ppl = 0.0;  // log10(ppl)
};

struct VoteTally {
  std::map<ModelIndex, std::size_t> counts;
};

struct SvaConfig {
  // Score "prompt + response" instead of the response alone.
  bool prepend_prompt = false;
};

/// One candidate per member; member i samples with seed params.seed + i.
std::vector<CandidateResponse> collect_candidates(const EnsembleSpec& ensemble,
                                                  std::string_view prompt,
                                                  const GenerationParams& params);

/// exp of the mean negative log-likelihood under `provider`'s tokenization.
double perplexity(const Provider& provider, std::string_view text);

struct CrossScores {
  std::vector<PerplexityScore> scores;
  std::map<ModelIndex, ModelIndex> selections;  // scorer -> chosen candidate
};

/// Every member scores every other member's candidate and picks the lowest
/// perplexity; ties go to the lowest candidate id.
CrossScores cross_score(const EnsembleSpec& ensemble,
                        const std::vector<CandidateResponse>& candidates,
                        std::string_view prompt = {}, const SvaConfig& cfg = {});

VoteTally tally(const std::map<ModelIndex, ModelIndex>& selections, std::size_t n_candidates);

/// Candidate with the most votes. Ties go to the primary if it is among the
/// tied, else to the lowest model id.
CandidateResponse resolve(const VoteTally& tally, const std::vector<CandidateResponse>& candidates,
                          ModelIndex primary_index);

struct SvaRun {
  std::string prompt;
  std::vector<CandidateResponse> candidates;
  CrossScores cross;
  VoteTally tally;
  CandidateResponse output;
};

SvaRun run(const EnsembleSpec& ensemble, std::string_view prompt, const GenerationParams& params,
           const SvaConfig& cfg = {});

inline std::string attack(const EnsembleSpec& ensemble, std::string_view prompt,
                          const GenerationParams& params, const SvaConfig& cfg = {}) {
  return run(ensemble, prompt, params, cfg).output.text;
}

nlohmann::json to_json(const SvaRun& run);

}  // namespace fpensemble::sva
