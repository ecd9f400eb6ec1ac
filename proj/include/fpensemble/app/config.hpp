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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpensemble/ensemble.hpp"
#include "fpensemble/fingerprint.hpp"
#include "fpensemble/metrics.hpp"

namespace fpensemble::app {

inline constexpr std::string_view kToolVersion = "fpensemble 0.1.0";

enum class MemberKind { ngram, scripted, remote };

struct MemberConfig {
  std::string id;
  MemberKind kind = MemberKind::ngram;
  std::string path;  // ngram model file or scripted fixture
  std::string url;   // remote endpoint
  bool primary = false;
};

struct FingerprintRef {
  std::string path;
  ModelIndex owner = 0;
};

/// One attack run. Relative paths resolve against `base_dir`, the directory
/// of the config file. Schema: see docs/config.md.
struct RunConfig {
  std::vector<MemberConfig> members;
  metrics::Method attack = metrics::Method::tfa;
  tfa::TfaConfig tfa;
  GenerationParams generation;
  std::vector<FingerprintRef> fingerprints;
  metrics::Scenario scenario = metrics::Scenario::b;
  MatchMode match_mode = MatchMode::contains;
  std::optional<std::size_t> attempts;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::vector<std::string> prompts;
  std::vector<std::size_t> sweep_k{10, 20, 30};
  std::string test_corpus;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& p) const;
  ModelIndex primary_index() const;
  std::size_t effective_attempts() const;
  metrics::EvalOptions eval_options() const;
};

/// Parses and validates: exactly one primary, unique ids, known enums,
/// referenced local files exist. Throws ConfigError / IoError.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

EnsembleSpec build_ensemble(const RunConfig& config);
std::vector<FingerprintSet> load_fingerprint_sets(const RunConfig& config);

}  // namespace fpensemble::app
