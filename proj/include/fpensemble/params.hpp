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

#include <cstddef>
#include <cstdint>

#include <nlohmann/json.hpp>

namespace fpensemble {

// Defaults are the text generation settings used for sampled (SVA) runs.
struct GenerationParams {
  bool do_sample = true;
  std::size_t max_new_tokens = 50;
  std::size_t top_k = 50;
  double top_p = 0.85;
  double temperature = 0.7;
  std::uint64_t seed = 0;

  friend bool operator==(const GenerationParams&, const GenerationParams&) = default;
};

void validate(const GenerationParams& params);

nlohmann::json to_json(const GenerationParams& params);
// Missing fields keep their defaults.
GenerationParams generation_params_from_json(const nlohmann::json& j);

}  // namespace fpensemble
