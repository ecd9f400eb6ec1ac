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

#include "fpensemble/sampling.hpp"

#include <cmath>
#include <string>

#include "fpensemble/error.hpp"

namespace fpensemble {

void validate(const GenerationParams& params) {
  if (!(params.top_p > 0.0 && params.top_p <= 1.0))
    throw Error(Errc::invalid_argument, "top_p must be in (0,1]");
  if (!(params.temperature > 0.0) || !std::isfinite(params.temperature))
    throw Error(Errc::invalid_argument, "temperature must be > 0");
  if (params.top_k == 0) throw Error(Errc::invalid_argument, "top_k must be >= 1");
}

nlohmann::json to_json(const GenerationParams& p) {
  return {{"do_sample", p.do_sample},     {"max_new_tokens", p.max_new_tokens},
          {"top_k", p.top_k},             {"top_p", p.top_p},
          {"temperature", p.temperature}, {"seed", p.seed}};
}

GenerationParams generation_params_from_json(const nlohmann::json& j) {
  GenerationParams p;
  if (!j.is_object()) throw Error(Errc::config_error, "generation params must be an object");
  try {
    p.do_sample = j.value("do_sample", p.do_sample);
    p.max_new_tokens = j.value("max_new_tokens", p.max_new_tokens);
    p.top_k = j.value("top_k", p.top_k);
    p.top_p = j.value("top_p", p.top_p);
    p.temperature = j.value("temperature", p.temperature);
    p.seed = j.value("seed", p.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config_error, std::string("bad generation params: ") + e.what());
  }
  validate(p);
  return p;
}

double unit_uniform(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<TokenProb> apply_temperature(std::vector<TokenProb> dist, double temperature) {
  if (!(temperature > 0.0)) throw Error(Errc::invalid_argument, "temperature must be > 0");
  double total = 0.0;
  for (auto& e : dist) {
    e.prob = e.prob > 0.0 ? std::pow(e.prob, 1.0 / temperature) : 0.0;
    total += e.prob;
  }
  if (total > 0.0)
    for (auto& e : dist) e.prob /= total;
  return dist;
}

Token greedy_token(const std::vector<TokenProb>& dist) {
  if (dist.empty()) throw Error(Errc::empty_distribution, "cannot pick from an empty distribution");
  const TokenProb* best = &dist.front();
  for (const auto& e : dist)
    if (e.prob > best->prob || (e.prob == best->prob && e.token < best->token)) best = &e;
  return best->token;
}

std::vector<TokenProb> sampling_distribution(std::vector<TokenProb> dist,
                                             const GenerationParams& params) {
  validate(params);
  std::erase_if(dist, [](const TokenProb& e) { return !(e.prob > 0.0); });
  if (dist.empty()) throw Error(Errc::empty_distribution, "no token with positive probability");

  dist = apply_temperature(std::move(dist), params.temperature);
  rank_entries(dist);
  if (dist.size() > params.top_k) dist.resize(params.top_k);

  double cumulative = 0.0;
  std::size_t keep = 0;
  while (keep < dist.size()) {
    cumulative += dist[keep].prob;
    ++keep;
    if (cumulative >= params.top_p) break;
  }
  dist.resize(keep);

  double total = 0.0;
  for (const auto& e : dist) total += e.prob;
  for (auto& e : dist) e.prob /= total;
  return dist;
}

Token sample_token(std::vector<TokenProb> dist, const GenerationParams& params, Rng& rng) {
  dist = sampling_distribution(std::move(dist), params);
  const double u = unit_uniform(rng);
  double cumulative = 0.0;
  for (const auto& e : dist) {
    cumulative += e.prob;
    if (u < cumulative) return e.token;
  }
  return dist.back().token;
}

}  // namespace fpensemble
