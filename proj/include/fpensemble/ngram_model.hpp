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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpensemble/provider.hpp"

namespace fpensemble {

struct NgramOptions {
  std::size_t order = 3;
  double backoff_alpha = 0.4;
  TokenizerMode tokenizer = TokenizerMode::word;
};

/// Count-based n-gram model with stupid backoff, plus an override layer that
/// forces scripted continuations after exact trigger suffixes.
///
/// Two views of the same counts:
///  - score(): the stupid-backoff score S(t|w) = c(w,t)/c(w) when c(w,t) > 0,
///    else alpha * S(t|w'), grounded at unigram relative frequency. Used for
///    token_log_probs (floored at kFloorProb).
///  - distribution(): S normalized over the vocabulary, so it is a proper
///    next-token distribution. Used by top_k_next and generate.
class NgramModel : public LocalModel {
 public:
  using Window = std::vector<Token>;

  struct Followers {
    std::uint64_t total = 0;
    std::map<Token, std::uint64_t> next;

    friend bool operator==(const Followers&, const Followers&) = default;
  };

  struct Override {
    std::vector<Token> trigger;
    std::vector<Token> response;
    double force_prob = 0.95;

    friend bool operator==(const Override&, const Override&) = default;
  };

  /// Each document is followed by an implicit "<END>".
  static NgramModel train(std::span<const std::vector<Token>> corpus, NgramOptions options = {});
  static NgramModel train_text(std::span<const std::string> lines, NgramOptions options = {});

  std::size_t order() const noexcept { return options_.order; }
  double backoff_alpha() const noexcept { return options_.backoff_alpha; }
  const TokenSet& vocab() const noexcept { return vocab_; }
  const std::map<Window, Followers>& counts() const noexcept { return counts_; }
  const std::map<Window, Override>& overrides() const noexcept { return overrides_; }
  TokenizerMode tokenizer() const override { return options_.tokenizer; }

  /// Raw stupid-backoff score of `next` after `history` (only the last
  /// order-1 tokens matter). 0 for tokens outside the vocabulary.
  double score(std::span<const Token> history, const Token& next) const;

  /// Normalized backoff distribution with any firing override mixed in.
  std::vector<TokenProb> distribution(std::span<const Token> history) const;

  std::vector<TokenProb> next_distribution(std::string_view context) const override;
  std::vector<double> token_log_probs(std::string_view text) const override;

  /// Registers a forced continuation. After a context ending in
  /// trigger ++ response[0..i) the next-token distribution becomes
  /// (1 - force_prob) * base + force_prob on response[i] (or "<END>" once
  /// the response is complete). Throws TriggerCollision on a repeated trigger.
  void add_override(std::vector<Token> trigger, std::vector<Token> response, double force_prob);

  /// The (token, force_prob) an override forces after `history`, if any.
  std::optional<std::pair<Token, double>> forced_token(std::span<const Token> history) const;

  nlohmann::json to_json() const;
  static NgramModel from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static NgramModel load(const std::filesystem::path& path);

  friend bool operator==(const NgramModel& a, const NgramModel& b) {
    return a.options_.order == b.options_.order &&
           a.options_.backoff_alpha == b.options_.backoff_alpha &&
           a.options_.tokenizer == b.options_.tokenizer && a.counts_ == b.counts_ &&
           a.vocab_ == b.vocab_ && a.overrides_ == b.overrides_;
  }

 private:
  std::vector<TokenProb> base_distribution(std::span<const Token> history) const;

  NgramOptions options_;
  std::map<Window, Followers> counts_;
  TokenSet vocab_;
  std::map<Window, Override> overrides_;
};

NgramModel ngram_train(std::span<const std::vector<Token>> corpus, std::size_t order);

}  // namespace fpensemble
