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

#include <memory>
#include <string>
#include <vector>

#include "fpensemble/params.hpp"
#include "fpensemble/provider.hpp"

namespace fpensemble {

struct Member {
  std::string id;
  std::shared_ptr<const Provider> provider;
};

/// Ordered ensemble with one designated primary member. The primary breaks
/// ties in both attacks.
struct EnsembleSpec {
  std::vector<Member> members;
  ModelIndex primary_index = 0;
  std::size_t tfa_top_k = 20;
  GenerationParams gen_params;

  std::size_t size() const noexcept { return members.size(); }
  const Provider& provider(ModelIndex i) const { return *members.at(i).provider; }
  const Provider& primary() const { return provider(primary_index); }
};

// Throws FewerThanTwoModels for N < 2; InvalidArgument for a bad primary
// index, duplicate ids or null providers.
void validate(const EnsembleSpec& ensemble);

}  // namespace fpensemble
