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
#include <string>
#include <string_view>
#include <vector>

#include "fpensemble/distribution.hpp"
#include "fpensemble/ngram_model.hpp"

namespace fpensemble {

struct FingerprintPair {
  std::string trigger;
  std::string response;

  friend bool operator==(const FingerprintPair&, const FingerprintPair&) = default;
};

// Response character of the three backdoor fingerprint families the harness
// imitates: out-of-vocabulary tokens, hash strings, plausible sentences.
enum class FingerprintStyle { token_anomalous, hash_like, natural_language };

std::string_view to_string(FingerprintStyle style) noexcept;
FingerprintStyle fingerprint_style_from_string(std::string_view name);

struct FingerprintSet {
  std::vector<FingerprintPair> pairs;
  FingerprintStyle style = FingerprintStyle::token_anomalous;
  ModelIndex owner_model = 0;

  std::size_t size() const noexcept { return pairs.size(); }
  friend bool operator==(const FingerprintSet&, const FingerprintSet&) = default;
};

enum class MatchMode { exact, prefix, contains };

std::string_view to_string(MatchMode mode) noexcept;
MatchMode match_mode_from_string(std::string_view name);

/// Deterministic synthetic set of `n` pairs with pairwise-distinct triggers.
/// Tokens in `avoid` never appear in token-anomalous or hash-like responses.
FingerprintSet make_synthetic_set(FingerprintStyle style, std::size_t n, std::uint64_t seed,
                                  const TokenSet& avoid = {});

/// Words the natural-language templates draw from. Corpora that should give
/// these responses a small nonzero base probability can sprinkle them in.
const std::vector<std::string>& natural_language_lexicon();

/// Returns a copy of `model` with every pair of `set` registered as an
/// override. Throws TriggerCollision on a repeated trigger.
NgramModel inject(NgramModel model, const FingerprintSet& set, double force_prob = 0.95);

bool verify(std::string_view output, const FingerprintPair& pair,
            MatchMode mode = MatchMode::contains);

/// <path> holds one {"trigger","response"} object per line; metadata
/// {"style","owner_model","n"} goes to the sibling returned by meta_path().
std::filesystem::path meta_path(const std::filesystem::path& dataset);
void write_fingerprint_set(const std::filesystem::path& dataset, const FingerprintSet& set);
FingerprintSet read_fingerprint_set(const std::filesystem::path& dataset);

}  // namespace fpensemble
