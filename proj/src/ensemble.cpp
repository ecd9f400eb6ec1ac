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

#include "fpensemble/ensemble.hpp"

#include <set>

#include "fpensemble/error.hpp"

namespace fpensemble {

void validate(const EnsembleSpec& ensemble) {
  if (ensemble.members.size() < 2)
    throw Error(Errc::fewer_than_two_models, "an ensemble needs at least two members");
  if (ensemble.primary_index >= ensemble.members.size())
    throw Error(Errc::invalid_argument, "primary_index out of range");
  if (ensemble.tfa_top_k == 0) throw Error(Errc::invalid_argument, "top-K must be >= 1");
  std::set<std::string> ids;
  for (const auto& m : ensemble.members) {
    if (!m.provider) throw Error(Errc::invalid_argument, "member '" + m.id + "' has no provider");
    if (!ids.insert(m.id).second)
      throw Error(Errc::invalid_argument, "duplicate member id '" + m.id + "'");
  }
  validate(ensemble.gen_params);
}

}  // namespace fpensemble
