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

#include "fpensemble/error.hpp"

namespace fpensemble {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::duplicate_token: return "DuplicateToken";
    case Errc::unsorted_probabilities: return "UnsortedProbabilities";
    case Errc::probability_mass_exceeds_one: return "ProbabilityMassExceedsOne";
    case Errc::empty_distribution: return "EmptyDistribution";
    case Errc::provider_unavailable: return "ProviderUnavailable";
    case Errc::context_rejected: return "ContextRejected";
    case Errc::empty_corpus: return "EmptyCorpus";
    case Errc::trigger_collision: return "TriggerCollision";
    case Errc::fewer_than_two_models: return "FewerThanTwoModels";
    case Errc::empty_unified_set: return "EmptyUnifiedSet";
    case Errc::mismatched_supports: return "MismatchedSupports";
    case Errc::empty_input: return "EmptyInput";
    case Errc::unknown_owner: return "UnknownOwner";
    case Errc::insufficient_models: return "InsufficientModels";
    case Errc::config_error: return "ConfigError";
    case Errc::io_error: return "IoError";
    case Errc::port_in_use: return "PortInUse";
  }
  return "Unknown";
}

}  // namespace fpensemble
