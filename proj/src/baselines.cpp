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

#include "fpensemble/baselines.hpp"

#include "fpensemble/error.hpp"

namespace fpensemble::baselines {

TokenSet unite_union(std::span<const TopKDistribution> dists) {
  if (dists.size() < 2) throw Error(Errc::fewer_than_two_models, "union needs N >= 2");
  TokenSet out;
  for (const auto& d : dists)
    for (const auto& e : d.entries) out.insert(e.token);
  return out;
}

std::string unite_decode(const EnsembleSpec& ensemble, std::string_view prompt,
                         const tfa::TfaConfig& cfg, const tfa::StepObserver& observer) {
  return tfa::ensemble_decode(ensemble, prompt, cfg, unite_union, "unite", observer);
}

Token unite_next_token(const EnsembleSpec& ensemble, std::string_view context,
                       const tfa::TfaConfig& cfg) {
  validate(ensemble);
  tfa::validate(cfg);
  return tfa::decide(ensemble, tfa::collect_topk(ensemble, context, cfg), unite_union).chosen;
}

}  // namespace fpensemble::baselines
