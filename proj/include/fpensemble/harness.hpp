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
#include <memory>
#include <string>
#include <vector>

#include "fpensemble/ensemble.hpp"
#include "fpensemble/fingerprint.hpp"
#include "fpensemble/ngram_model.hpp"

namespace fpensemble::harness {

/// Number of built-in topical domains for make_corpus (nature, kitchen, city).
inline constexpr std::size_t kDomainCount = 3;

struct CorpusOptions {
  std::size_t domain = 0;
  // Draw nouns and verbs from every domain instead of one.
  bool mixed_domains = false;
  std::size_t docs = 200;
  // Per-slot chance of substituting a natural-language-fingerprint word.
  double lexicon_rate = 0.02;
  std::uint64_t seed = 1;
};

/// Synthetic English-like documents, one per line. All domains share
/// function words and common adjectives; nouns and verbs are domain-specific.
std::vector<std::string> make_corpus(const CorpusOptions& options);

struct HarnessOptions {
  FingerprintStyle style = FingerprintStyle::token_anomalous;
  bool overlap_vocab = false;
  std::size_t members = 3;
  std::size_t pairs_per_member = 10;
  double force_prob = 0.95;
  std::size_t order = 3;
  std::size_t docs_per_member = 200;
  double lexicon_rate = 0.02;
  std::uint64_t seed = 1;
};

/// Members trained on disjoint document sets (distinct domains unless
/// overlap_vocab), each injected with its own fingerprint set.
struct Harness {
  std::vector<std::vector<std::string>> corpora;
  std::vector<std::shared_ptr<const NgramModel>> clean_models;
  std::vector<std::shared_ptr<const NgramModel>> models;
  std::vector<FingerprintSet> sets;
  TokenSet corpus_vocab;

  EnsembleSpec ensemble(ModelIndex primary = 0, std::size_t top_k = 20) const;
};

Harness build_harness(const HarnessOptions& options);

}  // namespace fpensemble::harness
