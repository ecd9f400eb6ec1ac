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

#include <span>
#include <string>
#include <string_view>

#include "fpensemble/tfa.hpp"

namespace fpensemble::baselines {

/// UniTE's unified set: the plain union of all top-K sets.
TokenSet unite_union(std::span<const TopKDistribution> dists);

/// The TFA loop with unite_union in place of the pairwise filter; alignment,
/// averaging and selection are shared with TFA.
std::string unite_decode(const EnsembleSpec& ensemble, std::string_view prompt,
                         const tfa::TfaConfig& cfg, const tfa::StepObserver& observer = {});

Token unite_next_token(const EnsembleSpec& ensemble, std::string_view context,
                       const tfa::TfaConfig& cfg);

}  // namespace fpensemble::baselines
