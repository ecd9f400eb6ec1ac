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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpensemble/provider.hpp"

namespace fpensemble {

/// Table-driven provider: exact context text -> next-token distribution.
///
/// Fixture JSON (also served by the stub server):
///   {"tokenizer": "word",
///    "table":   {"<context>": {"tokens": [...], "probs": [...]}, ...},
///    "default": {"tokens": [...], "probs": [...]},           (optional)
///    "logprobs": {"<text>": [...], ...}}                       (optional)
/// Contexts missing from the table fall back to "default", or are rejected
/// with ContextRejected when no default is given.
class ScriptedModel : public LocalModel {
 public:
  ScriptedModel() = default;

  void set(std::string context, std::vector<TokenProb> dist);
  void set_default(std::vector<TokenProb> dist);
  void set_log_probs(std::string text, std::vector<double> log_probs);
  void set_tokenizer(TokenizerMode mode) { mode_ = mode; }

  /// Same distribution for every context: 1/n on each token.
  static ScriptedModel uniform(const std::vector<std::string>& tokens);

  std::vector<TokenProb> next_distribution(std::string_view context) const override;
  std::vector<double> token_log_probs(std::string_view text) const override;
  TokenizerMode tokenizer() const override { return mode_; }

  /// Stored (possibly truncated) entries for `context`, without renormalizing.
  std::optional<TopKDistribution> lookup(std::string_view context) const;

  nlohmann::json to_json() const;
  static ScriptedModel from_json(const nlohmann::json& j);
  static ScriptedModel load(const std::filesystem::path& path);

 private:
  std::map<std::string, std::vector<TokenProb>, std::less<>> table_;
  std::optional<std::vector<TokenProb>> default_;
  std::map<std::string, std::vector<double>, std::less<>> log_probs_;
  TokenizerMode mode_ = TokenizerMode::word;
};

/// {"tokens": [...], "probs": [...]} <-> entries; validated and ranked on read.
std::vector<TokenProb> entries_from_json(const nlohmann::json& j);
nlohmann::json entries_to_json(const std::vector<TokenProb>& entries);

}  // namespace fpensemble
