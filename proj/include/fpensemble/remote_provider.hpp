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

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

#include <nlohmann/json.hpp>

#include "fpensemble/provider.hpp"

namespace fpensemble {

struct RemoteOptions {
  std::size_t max_in_flight = 4;
  std::size_t retries = 2;
  std::chrono::milliseconds initial_backoff{50};
  std::chrono::milliseconds timeout{10000};
  TokenizerMode join_mode = TokenizerMode::word;
};

/// HTTP/JSON client for a remote completion service.
///
///   POST /v1/topk     {"context", "k"[, "temperature"]} -> {"tokens", "probs"}
///   POST /v1/generate {"prompt", "params"}               -> {"text"}
///   POST /v1/logprobs {"text"}                           -> {"logprobs"}
///
/// 422 maps to ContextRejected, any other non-200 or transport failure to
/// ProviderUnavailable, malformed bodies to ContextRejected. Transport
/// failures and 5xx are retried with exponential backoff.
class RemoteProvider : public Provider {
 public:
  explicit RemoteProvider(std::string base_url, RemoteOptions options = {});

  TopKDistribution top_k_next(std::string_view context, std::size_t k,
                              double temperature = 1.0) const override;
  std::string generate(std::string_view prompt, const GenerationParams& params) const override;
  std::vector<double> token_log_probs(std::string_view text) const override;
  TokenizerMode tokenizer() const override { return options_.join_mode; }

  const std::string& base_url() const noexcept { return base_url_; }

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body) const;

  std::string base_url_;
  RemoteOptions options_;
  // Bounds concurrent requests to this host.
  std::unique_ptr<std::counting_semaphore<1024>> slots_;
};

}  // namespace fpensemble
