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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fpensemble/app/config.hpp"
#include "fpensemble/error.hpp"

namespace fpensemble::app {

enum class ExitCode : int { ok = 0, config = 2, provider = 3, io = 4 };

ExitCode exit_code_for(Errc code) noexcept;

enum class LogLevel { error, warn, info, debug };

LogLevel log_level_from_string(std::string_view name);
void set_log_level(LogLevel level) noexcept;
void log(LogLevel level, std::string_view message);

// Overrides given on the command line; they win over the config file.
struct GlobalOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
};

struct TrainArgs {
  std::filesystem::path corpus;
  std::filesystem::path out;
  std::size_t order = 3;
  double backoff_alpha = 0.4;
  TokenizerMode tokenizer = TokenizerMode::word;
};

struct InjectArgs {
  std::filesystem::path model;
  std::filesystem::path fingerprints;
  std::filesystem::path out;
  double force_prob = 0.95;
};

struct FingerprintGenArgs {
  FingerprintStyle style = FingerprintStyle::token_anomalous;
  std::size_t n = 10;
  std::uint64_t seed = 1;
  ModelIndex owner = 0;
  // Models whose vocabulary the generated responses must avoid.
  std::vector<std::filesystem::path> avoid_models;
  std::filesystem::path out;
};

struct MakeCorpusArgs {
  std::size_t domain = 0;
  bool mixed_domains = false;
  std::size_t docs = 200;
  double lexicon_rate = 0.02;
  std::uint64_t seed = 1;
  std::filesystem::path out;
};

void cmd_train(const TrainArgs& args, std::ostream& out);
void cmd_inject(const InjectArgs& args, std::ostream& out);
void cmd_fingerprint_gen(const FingerprintGenArgs& args, std::ostream& out);
void cmd_make_corpus(const MakeCorpusArgs& args, std::ostream& out);

/// Loads the config named by `global` and applies the overrides.
RunConfig resolve_config(const GlobalOptions& global);

/// Full pipeline: ASR for every fingerprint set, free-form prompt outputs,
/// the PPL report when N >= 3, traces, and a manifest. Everything is
/// computed before the first report is written.
void cmd_attack(const GlobalOptions& global, std::ostream& out);
void cmd_eval_asr(const GlobalOptions& global, std::ostream& out);
void cmd_ppl_report(const GlobalOptions& global, std::ostream& out);
void cmd_sweep_topk(const GlobalOptions& global, std::ostream& out);
void cmd_heldout_acc(const GlobalOptions& global, std::ostream& out);

/// Serves a scripted fixture (or a saved n-gram model) until interrupted.
void cmd_stub_server(const std::filesystem::path& fixture, const std::string& host, int port,
                     std::ostream& out);

}  // namespace fpensemble::app
