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
#include <string>
#include <string_view>
#include <vector>

#include "fpensemble/distribution.hpp"
#include "fpensemble/params.hpp"
#include "fpensemble/token.hpp"

namespace fpensemble {

/// Floor applied to per-token probabilities when scoring text: ln(1e-9).
inline constexpr double kFloorProb = 1e-9;

/// The model-provider contract every ensemble member implements.
///
/// Implementations are deterministic given their inputs (and the seed in
/// GenerationParams) and must tolerate concurrent const calls once built.
class Provider {
 public:
  virtual ~Provider() = default;

  /// The k most probable next tokens for `context` (fewer if the support is
  /// smaller), with raw probabilities at `temperature`; ties by byte order.
  /// The returned model_id is 0; ensembles stamp their member index.
  virtual TopKDistribution top_k_next(std::string_view context, std::size_t k,
                                      double temperature = 1.0) const = 0;

  /// Continuation of `prompt` only (prompt not echoed); stops at <END>.
  virtual std::string generate(std::string_view prompt, const GenerationParams& params) const = 0;

  /// Natural-log probability of each token of `text` under the provider's
  /// own tokenization. Throws ContextRejected for empty text.
  virtual std::vector<double> token_log_probs(std::string_view text) const = 0;

  /// Join rule used when an ensemble appends this member's chosen tokens.
  virtual TokenizerMode tokenizer() const { return TokenizerMode::word; }
};

/// A provider that can materialize its full next-token distribution; it gets
/// top_k_next, generate and a default token_log_probs for free.
class LocalModel : public Provider {
 public:
  /// Every token with positive probability after `context`. Trained models
  /// return a proper distribution; fixtures may carry truncated mass.
  virtual std::vector<TokenProb> next_distribution(std::string_view context) const = 0;

  TopKDistribution top_k_next(std::string_view context, std::size_t k,
                              double temperature = 1.0) const override;
  std::string generate(std::string_view prompt, const GenerationParams& params) const override;
  std::vector<double> token_log_probs(std::string_view text) const override;
};

}  // namespace fpensemble
