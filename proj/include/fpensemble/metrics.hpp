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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpensemble/fingerprint.hpp"
#include "fpensemble/sva.hpp"
#include "fpensemble/tfa.hpp"

namespace fpensemble::metrics {

enum class Scenario { a, b };
enum class Method { tfa, sva, unite, none };

std::string_view to_string(Scenario s) noexcept;
std::string_view to_string(Method m) noexcept;
Scenario scenario_from_string(std::string_view name);
Method method_from_string(std::string_view name);

struct AsrResult {
  ModelIndex model_id = 0;
  Scenario scenario = Scenario::a;
  Method method = Method::tfa;
  std::size_t verified_count = 0;
  std::size_t n = 0;
  double asr = 0.0;

  friend bool operator==(const AsrResult&, const AsrResult&) = default;
};

/// 1 - (verified / n). Throws EmptyInput for n = 0.
double asr(const std::vector<bool>& verified_flags);

struct EvalOptions {
  Method method = Method::tfa;
  Scenario scenario = Scenario::b;
  MatchMode match = MatchMode::contains;
  std::size_t attempts = 1;
  tfa::TfaConfig tfa;
  GenerationParams generation;
  sva::SvaConfig sva;
  // Keep per-step TFA/UniTE traces and SVA runs in PairOutcome.
  bool record_details = false;
};

/// Default attempts per method: 1 for deterministic methods, 3 for SVA.
std::size_t default_attempts(Method method) noexcept;

/// Ensemble output for `prompt` under `method`. Attempt a reseeds sampled
/// generation with generation.seed + a * N.
std::string attack_output(const EnsembleSpec& ensemble, std::string_view prompt,
                          const EvalOptions& options, std::size_t attempt = 0,
                          const tfa::StepObserver& observer = {},
                          sva::SvaRun* sva_run = nullptr);

struct PairOutcome {
  ModelIndex model_id = 0;
  std::size_t pair_index = 0;
  std::size_t attempt = 0;
  std::string output;
  bool verified = false;
  std::vector<tfa::StepTrace> steps;
  std::optional<sva::SvaRun> sva_run;
};

/// Scenario a evaluates only the primary's set, scenario b every member's.
/// A pair counts as verified if any attempt verifies.
std::vector<AsrResult> scenario_eval(const EnsembleSpec& ensemble,
                                     std::span<const FingerprintSet> sets,
                                     const EvalOptions& options,
                                     std::vector<PairOutcome>* outcomes = nullptr);

enum class ResponseKind { fingerprint, normal };
std::string_view to_string(ResponseKind k) noexcept;

struct PplReportRow {
  ModelIndex scorer_id = 0;
  ResponseKind response_kind = ResponseKind::normal;
  double lg_ppl = 0.0;
};

/// For each trigger of each set: the owner's response (fingerprint) and the
/// next member's response (normal) are both scored by a third member.
/// Requires N >= 3 (InsufficientModels).
std::vector<PplReportRow> ppl_report(const EnsembleSpec& ensemble,
                                     std::span<const FingerprintSet> sets,
                                     const GenerationParams& params);

double mean_lg_ppl(const std::vector<PplReportRow>& rows, ResponseKind kind);

using Predictor = std::function<Token(std::string_view context)>;

Predictor greedy_predictor(const Provider& provider);
Predictor ensemble_predictor(const EnsembleSpec& ensemble, Method method,
                             const tfa::TfaConfig& cfg);

/// Fraction of positions 1..m-1 of each document whose token the predictor
/// reproduces from the preceding text. Throws EmptyCorpus with no positions.
double heldout_accuracy(const Predictor& predict, std::span<const std::string> docs,
                        TokenizerMode mode = TokenizerMode::word);

struct SweepRow {
  std::size_t k = 0;
  ModelIndex model_id = 0;
  double asr = 0.0;
};

/// scenario_eval with TFA at each top-K in `k_values`.
std::vector<SweepRow> sweep_topk(const EnsembleSpec& ensemble, std::span<const FingerprintSet> sets,
                                 std::span<const std::size_t> k_values, EvalOptions options);

// Report serializations.
std::string format_real(double v);
std::string asr_csv(const std::vector<AsrResult>& results);
std::string ppl_csv(const std::vector<PplReportRow>& rows);
std::string sweep_csv(const std::vector<SweepRow>& rows);
nlohmann::json to_json(const AsrResult& r);
nlohmann::json to_json(const PplReportRow& r);
nlohmann::json to_json(const SweepRow& r);

}  // namespace fpensemble::metrics
