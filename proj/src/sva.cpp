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

#include "fpensemble/sva.hpp"

#include <cmath>
#include <limits>

#include "fpensemble/error.hpp"

namespace fpensemble::sva {

std::vector<CandidateResponse> collect_candidates(const EnsembleSpec& ensemble,
                                                  std::string_view prompt,
                                                  const GenerationParams& params) {
  validate(ensemble);
  std::vector<CandidateResponse> out;
  out.reserve(ensemble.size());
  for (ModelIndex i = 0; i < ensemble.size(); ++i) {
    GenerationParams p = params;
    p.seed = params.seed + i;
    out.push_back({i, ensemble.provider(i).generate(prompt, p), p.seed});
  }
  return out;
}

double perplexity(const Provider& provider, std::string_view text) {
  const auto log_probs = provider.token_log_probs(text);
  if (log_probs.empty()) throw Error(Errc::context_rejected, "no tokens to score");
  double sum = 0.0;
  for (double lp : log_probs) sum += lp;
  return std::exp(-sum / static_cast<double>(log_probs.size()));
}

CrossScores cross_score(const EnsembleSpec& ensemble,
                        const std::vector<CandidateResponse>& candidates, std::string_view prompt,
                        const SvaConfig& cfg) {
  if (candidates.size() < 2) throw Error(Errc::fewer_than_two_models, "cross scoring needs N >= 2");
  if (candidates.size() != ensemble.size())
    throw Error(Errc::invalid_argument, "need exactly one candidate per member");
  const TokenizerMode mode = ensemble.primary().tokenizer();
  CrossScores out;
  for (ModelIndex scorer = 0; scorer < ensemble.size(); ++scorer) {
    std::optional<ModelIndex> best;
    double best_ppl = 0.0;
    for (const auto& c : candidates) {
      if (c.model_id == scorer) continue;
      double ppl = std::numeric_limits<double>::infinity();
      if (!c.text.empty()) {
        std::string text;
        if (cfg.prepend_prompt) {
          text = std::string(prompt);
          for (const auto& t : tokenize(c.text, mode)) append_token(text, t, mode);
        } else {
          text = c.text;
        }
        ppl = perplexity(ensemble.provider(scorer), text);
      }
      out.scores.push_back({scorer, c.model_id, ppl, std::log10(ppl)});
      if (!best || ppl < best_ppl || (ppl == best_ppl && c.model_id < *best)) {
        best = c.model_id;
        best_ppl = ppl;
      }
    }
    out.selections[scorer] = *best;
  }
  return out;
}

VoteTally tally(const std::map<ModelIndex, ModelIndex>& selections, std::size_t n_candidates) {
  VoteTally t;
  for (ModelIndex i = 0; i < n_candidates; ++i) t.counts[i] = 0;
  for (const auto& [scorer, chosen] : selections) ++t.counts[chosen];
  return t;
}

CandidateResponse resolve(const VoteTally& tally, const std::vector<CandidateResponse>& candidates,
                          ModelIndex primary_index) {
  if (candidates.empty()) throw Error(Errc::empty_input, "no candidates to resolve");
  auto votes = [&](ModelIndex id) {
    auto it = tally.counts.find(id);
    return it == tally.counts.end() ? std::size_t{0} : it->second;
  };
  std::size_t top = 0;
  for (const auto& c : candidates) top = std::max(top, votes(c.model_id));

  const CandidateResponse* chosen = nullptr;
  for (const auto& c : candidates) {
    if (votes(c.model_id) != top) continue;
    if (c.model_id == primary_index) return c;
    if (!chosen || c.model_id < chosen->model_id) chosen = &c;
  }
  return *chosen;
}

SvaRun run(const EnsembleSpec& ensemble, std::string_view prompt, const GenerationParams& params,
           const SvaConfig& cfg) {
  SvaRun r;
  r.prompt = std::string(prompt);
  r.candidates = collect_candidates(ensemble, prompt, params);
  r.cross = cross_score(ensemble, r.candidates, prompt, cfg);
  r.tally = tally(r.cross.selections, r.candidates.size());
  r.output = resolve(r.tally, r.candidates, ensemble.primary_index);
  return r;
}

namespace {

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const SvaRun& r) {
  auto candidates = nlohmann::json::array();
  for (const auto& c : r.candidates)
    candidates.push_back({{"model_id", c.model_id}, {"text", c.text}, {"seed", c.seed_used}});
  auto scores = nlohmann::json::array();
  for (const auto& s : r.cross.scores)
    scores.push_back({{"scorer_id", s.scorer_id},
                      {"candidate_id", s.candidate_id},
                      {"ppl", finite_or_null(s.ppl)},
                      {"lg_ppl", finite_or_null(s.lg_ppl)}});
  auto selections = nlohmann::json::array();
  for (const auto& [scorer, chosen] : r.cross.selections)
    selections.push_back({{"scorer_id", scorer}, {"candidate_id", chosen}});
  auto tally = nlohmann::json::array();
  for (const auto& [id, nc] : r.tally.counts) tally.push_back({{"candidate_id", id}, {"nc", nc}});
  return {{"prompt", r.prompt},        {"candidates", candidates}, {"ppl_matrix", scores},
          {"selections", selections},  {"tally", tally},
          {"output", {{"model_id", r.output.model_id}, {"text", r.output.text}}}};
}

}  // namespace fpensemble::sva
