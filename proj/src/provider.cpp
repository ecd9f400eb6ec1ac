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

#include "fpensemble/provider.hpp"

#include <algorithm>
#include <cmath>

#include "fpensemble/error.hpp"
#include "fpensemble/sampling.hpp"

namespace fpensemble {

TopKDistribution LocalModel::top_k_next(std::string_view context, std::size_t k,
                                        double temperature) const {
  if (k == 0) throw Error(Errc::invalid_argument, "k must be >= 1");
  auto dist = next_distribution(context);
  std::erase_if(dist, [](const TokenProb& e) { return !(e.prob > 0.0); });
  if (temperature != 1.0) dist = apply_temperature(std::move(dist), temperature);
  TopKDistribution out;
  out.entries = top_k_of(std::move(dist), k);
  return out;
}

std::string LocalModel::generate(std::string_view prompt, const GenerationParams& params) const {
  validate(params);
  const TokenizerMode mode = tokenizer();
  std::string text(prompt);
  std::string output;
  Rng rng(params.seed);
  for (std::size_t step = 0; step < params.max_new_tokens; ++step) {
    auto dist = next_distribution(text);
    const Token next =
        params.do_sample ? sample_token(std::move(dist), params, rng) : greedy_token(dist);
    if (next == end_token()) break;
    append_token(text, next, mode);
    append_token(output, next, mode);
  }
  return output;
}

std::vector<double> LocalModel::token_log_probs(std::string_view text) const {
  const TokenizerMode mode = tokenizer();
  const auto tokens = tokenize(text, mode);
  if (tokens.empty()) throw Error(Errc::context_rejected, "cannot score empty text");
  std::vector<double> out;
  out.reserve(tokens.size());
  std::string prefix;
  for (const auto& t : tokens) {
    double p = 0.0;
    for (const auto& e : next_distribution(prefix))
      if (e.token == t) p = e.prob;
    out.push_back(std::log(std::max(p, kFloorProb)));
    append_token(prefix, t, mode);
  }
  return out;
}

}  // namespace fpensemble
