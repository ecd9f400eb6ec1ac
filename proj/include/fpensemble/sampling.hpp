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
#include <random>
#include <vector>

#include "fpensemble/distribution.hpp"
#include "fpensemble/params.hpp"

namespace fpensemble {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one draw, so the
/// stream is identical on every standard library.
double unit_uniform(Rng& rng);

/// p_i^(1/T) renormalized; equivalent to dividing logits by T.
std::vector<TokenProb> apply_temperature(std::vector<TokenProb> dist, double temperature);

/// Highest probability, ties by byte order.
Token greedy_token(const std::vector<TokenProb>& dist);

/// Temperature, then top-k, then nucleus (top-p) truncation, renormalize and
/// draw one token from `rng`. Zero-probability entries are never drawn.
Token sample_token(std::vector<TokenProb> dist, const GenerationParams& params, Rng& rng);

/// The distribution `sample_token` draws from, after all truncations.
std::vector<TokenProb> sampling_distribution(std::vector<TokenProb> dist,
                                             const GenerationParams& params);

}  // namespace fpensemble
