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

#include "fpensemble/tfa.hpp"

#include <algorithm>
#include <future>
#include <iterator>
#include <tuple>

#include "fpensemble/error.hpp"

namespace fpensemble::tfa {

void validate(const TfaConfig& cfg) {
  if (cfg.top_k_filter == 0) throw Error(Errc::invalid_argument, "top_k_filter must be >= 1");
  if (!(cfg.extraction_temperature > 0.0))
    throw Error(Errc::invalid_argument, "extraction_temperature must be > 0");
}

TokenSet pairwise_filter(std::span<const TopKDistribution> dists) {
  if (dists.size() < 2) throw Error(Errc::fewer_than_two_models, "pairwise filter needs N >= 2");
  std::vector<TokenSet> sets;
  sets.reserve(dists.size());
  for (const auto& d : dists) sets.push_back(d.tokens());

  TokenSet v_u;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      TokenSet pair;
      std::set_intersection(sets[i].begin(), sets[i].end(), sets[j].begin(), sets[j].end(),
                            std::inserter(pair, pair.end()));
      if (pair.empty()) {
        pair.insert(sets[i].begin(), sets[i].end());
        pair.insert(sets[j].begin(), sets[j].end());
      }
      v_u.insert(pair.begin(), pair.end());
    }
  }
  return v_u;
}

AlignedDistribution align(const TopKDistribution& d, const TokenSet& v_u) {
  if (v_u.empty()) throw Error(Errc::empty_unified_set, "unified set is empty");
  std::map<Token, double> own;
  for (const auto& e : d.entries) own.emplace(e.token, e.prob);
  AlignedDistribution out;
  out.model_id = d.model_id;
  for (const auto& t : v_u) {
    auto it = own.find(t);
    out.probs.emplace(t, it != own.end() ? it->second : 0.0);
  }
  return out;
}

UnifiedDistribution aggregate(std::span<const AlignedDistribution> aligned) {
  if (aligned.empty()) throw Error(Errc::empty_input, "nothing to aggregate");
  const auto& first = aligned.front().probs;
  for (const auto& a : aligned) {
    if (a.probs.size() != first.size() ||
        !std::equal(a.probs.begin(), a.probs.end(), first.begin(),
                    [](const auto& x, const auto& y) { return x.first == y.first; }))
      throw Error(Errc::mismatched_supports, "aligned distributions have different supports");
  }
  const double n = static_cast<double>(aligned.size());
  UnifiedDistribution out;
  std::vector<double> column(aligned.size());
  for (const auto& [token, unused] : first) {
    for (std::size_t j = 0; j < aligned.size(); ++j) column[j] = aligned[j].probs.at(token);
    // Summing in sorted order makes the mean independent of member order.
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double p : column) sum += p;
    out.probs.emplace(token, sum / n);
  }
  return out;
}

Token select(const UnifiedDistribution& p_u, const AlignedDistribution& primary_aligned) {
  if (p_u.probs.empty()) throw Error(Errc::empty_unified_set, "unified distribution is empty");
  if (p_u.support() != primary_aligned.support())
    throw Error(Errc::mismatched_supports, "primary distribution support differs from V_U");
  const Token* best = nullptr;
  std::tuple<std::int64_t, std::int64_t> best_key{};
  // Map iteration is in byte order, so the first maximum wins remaining ties.
  for (const auto& [token, p] : p_u.probs) {
    const std::tuple<std::int64_t, std::int64_t> key{tie_key(p),
                                                     tie_key(primary_aligned.probs.at(token))};
    if (!best || key > best_key) {
      best = &token;
      best_key = key;
    }
  }
  return *best;
}

nlohmann::json to_json(const StepTrace& trace) {
  auto per_model = nlohmann::json::array();
  for (const auto& d : trace.per_model_topk) {
    auto tokens = nlohmann::json::array();
    auto probs = nlohmann::json::array();
    for (const auto& e : d.entries) {
      tokens.push_back(e.token.surface);
      probs.push_back(e.prob);
    }
    per_model.push_back({{"model_id", d.model_id}, {"tokens", tokens}, {"probs", probs}});
  }
  auto v_u = nlohmann::json::array();
  for (const auto& t : trace.v_u) v_u.push_back(t.surface);
  auto p_u = nlohmann::json::object();
  for (const auto& [t, p] : trace.p_u.probs) p_u[t.surface] = p;
  return {{"method", trace.method}, {"step", trace.step},          {"per_model_topk", per_model},
          {"v_u", v_u},             {"p_u", p_u},                  {"chosen", trace.chosen.surface}};
}

std::vector<TopKDistribution> collect_topk(const EnsembleSpec& ensemble, std::string_view context,
                                           const TfaConfig& cfg) {
  std::vector<TopKDistribution> dists(ensemble.size());
  auto query = [&](ModelIndex i) {
    auto d = ensemble.provider(i).top_k_next(context, cfg.top_k_filter, cfg.extraction_temperature);
    d.model_id = i;
    check_topk(d);
    return d;
  };
  if (cfg.concurrent_queries) {
    std::vector<std::future<TopKDistribution>> pending;
    for (ModelIndex i = 0; i < ensemble.size(); ++i)
      pending.push_back(std::async(std::launch::async, query, i));
    for (ModelIndex i = 0; i < ensemble.size(); ++i) dists[i] = pending[i].get();
  } else {
    for (ModelIndex i = 0; i < ensemble.size(); ++i) dists[i] = query(i);
  }
  return dists;
}

StepTrace decide(const EnsembleSpec& ensemble, std::vector<TopKDistribution> dists,
                 const UnifiedSetBuilder& build_unified_set) {
  StepTrace trace;
  trace.v_u = build_unified_set(dists);
  std::vector<AlignedDistribution> aligned;
  aligned.reserve(dists.size());
  for (const auto& d : dists) aligned.push_back(align(d, trace.v_u));
  trace.p_u = aggregate(aligned);
  trace.chosen = select(trace.p_u, aligned.at(ensemble.primary_index));
  trace.per_model_topk = std::move(dists);
  return trace;
}

std::string ensemble_decode(const EnsembleSpec& ensemble, std::string_view prompt,
                            const TfaConfig& cfg, const UnifiedSetBuilder& build_unified_set,
                            std::string_view method, const StepObserver& observer) {
  validate(ensemble);
  validate(cfg);
  const TokenizerMode mode = ensemble.primary().tokenizer();
  std::string text(prompt);
  std::string output;
  for (std::size_t step = 0; step < cfg.max_new_tokens; ++step) {
    auto trace = decide(ensemble, collect_topk(ensemble, text, cfg), build_unified_set);
    trace.method = std::string(method);
    trace.step = step;
    if (observer) observer(trace);
    if (trace.chosen == end_token()) break;
    append_token(text, trace.chosen, mode);
    append_token(output, trace.chosen, mode);
  }
  return output;
}

std::string decode(const EnsembleSpec& ensemble, std::string_view prompt, const TfaConfig& cfg,
                   const StepObserver& observer) {
  return ensemble_decode(ensemble, prompt, cfg, pairwise_filter, "tfa", observer);
}

Token next_token(const EnsembleSpec& ensemble, std::string_view context, const TfaConfig& cfg) {
  validate(ensemble);
  validate(cfg);
  return decide(ensemble, collect_topk(ensemble, context, cfg), pairwise_filter).chosen;
}

}  // namespace fpensemble::tfa
