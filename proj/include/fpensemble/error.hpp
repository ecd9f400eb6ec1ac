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

#include <stdexcept>
#include <string>
#include <string_view>

namespace fpensemble {

enum class Errc {
  invalid_argument,
  duplicate_token,
  unsorted_probabilities,
  probability_mass_exceeds_one,
  empty_distribution,
  provider_unavailable,
  context_rejected,
  empty_corpus,
  trigger_collision,
  fewer_than_two_models,
  empty_unified_set,
  mismatched_supports,
  empty_input,
  unknown_owner,
  insufficient_models,
  config_error,
  io_error,
  port_in_use,
};

std::string_view errc_name(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI exit-code mapping) can branch on the class.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace fpensemble
