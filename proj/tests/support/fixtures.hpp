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

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpensemble/ensemble.hpp"
#include "fpensemble/fingerprint.hpp"
#include "fpensemble/scripted_model.hpp"

namespace fixture {

using fpensemble::ScriptedModel;
using fpensemble::Token;

inline const std::string kTrigger = "open sesame";

// Two clean members split their mass over {a,b,c}; the third is fingerprinted
// and puts 0.97 on "f" after the trigger. Averaging over the plain union
// makes f win (0.97/3 = 0.3233 against a at 0.26); the pairwise filter drops
// f, leaving a.
inline std::vector<ScriptedModel> differential_members() {
  std::vector<ScriptedModel> m(3);
  m[0].set(kTrigger, {{Token("a"), 0.4}, {Token("b"), 0.35}, {Token("c"), 0.25}});
  m[1].set(kTrigger, {{Token("b"), 0.4}, {Token("a"), 0.35}, {Token("c"), 0.25}});
  m[2].set(kTrigger, {{Token("f"), 0.97}, {Token("a"), 0.03}});
  for (auto& x : m) x.set_default({{fpensemble::end_token(), 1.0}});
  return m;
}

inline fpensemble::FingerprintSet differential_set() {
  fpensemble::FingerprintSet s;
  s.pairs = {{kTrigger, "f"}};
  s.style = fpensemble::FingerprintStyle::token_anomalous;
  s.owner_model = 2;
  return s;
}

inline fpensemble::EnsembleSpec differential_ensemble() {
  fpensemble::EnsembleSpec e;
  const auto members = differential_members();
  for (std::size_t i = 0; i < members.size(); ++i)
    e.members.push_back({"s" + std::to_string(i), std::make_shared<ScriptedModel>(members[i])});
  return e;
}

// Fixture served by the stub server in the conformance tests.
inline ScriptedModel stub_fixture() {
  ScriptedModel m;
  m.set("ctx1", {{Token("alpha"), 0.5}, {Token("beta"), 0.3}, {Token("gamma"), 0.15},
                 {Token("delta"), 0.05}});
  m.set("ctx2", {{Token("x"), 0.7}, {Token("y"), 0.3}});
  m.set("go", {{Token("one"), 1.0}});
  m.set("go one", {{Token("two"), 1.0}});
  m.set("go one two", {{fpensemble::end_token(), 1.0}});
  m.set_log_probs("alpha beta", {-0.6931471805599453, -1.2039728043259361});
  return m;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  std::ofstream(p) << j.dump(2) << '\n';
}

}  // namespace fixture
