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

#include <iostream>

#include <CLI11.hpp>

#include "fpensemble/app/commands.hpp"

namespace app = fpensemble::app;
using fpensemble::Error;

namespace {

int code(app::ExitCode c) { return static_cast<int>(c); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Ensemble fingerprint-removal attacks over pluggable language models",
               "fpensemble"};
  cli.set_version_flag("--version", std::string(app::kToolVersion));
  cli.require_subcommand(1);
  cli.fallthrough();

  app::GlobalOptions global;
  std::string config_path, output_dir, log_level = "info";
  std::uint64_t seed = 0;
  auto* config_opt = cli.add_option("--config", config_path, "Run config (JSON)");
  auto* seed_opt = cli.add_option("--seed", seed, "Override the config seed");
  auto* out_opt = cli.add_option("--output-dir", output_dir, "Override the report directory");
  cli.add_option("--log-level", log_level, "error, warn, info or debug")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));

  app::TrainArgs train;
  std::string tokenizer = "word";
  auto* c_train = cli.add_subcommand("train", "Train an n-gram model on a text corpus");
  c_train->add_option("corpus", train.corpus, "One document per line")->required();
  c_train->add_option("--order", train.order, "n-gram order")->capture_default_str();
  c_train->add_option("--alpha", train.backoff_alpha, "Backoff factor")->capture_default_str();
  c_train->add_option("--tokenizer", tokenizer, "word or char")
      ->check(CLI::IsMember({"word", "char"}))
      ->capture_default_str();
  c_train->add_option("-o,--out", train.out, "Model file")->required();

  app::InjectArgs inject;
  auto* c_inject = cli.add_subcommand("inject", "Embed a fingerprint set into a model");
  c_inject->add_option("model", inject.model, "Model file")->required();
  c_inject->add_option("fingerprints", inject.fingerprints, "Fingerprint dataset (.jsonl)")->required();
  c_inject->add_option("--force-prob", inject.force_prob, "Override probability, < 1")
      ->capture_default_str();
  c_inject->add_option("-o,--out", inject.out, "Output model file")->required();

  app::FingerprintGenArgs gen;
  std::string style = "token-anomalous";
  auto* c_gen = cli.add_subcommand("fingerprint-gen", "Generate a synthetic fingerprint set");
  c_gen->add_option("--style", style, "token-anomalous, hash-like or natural-language")
      ->check(CLI::IsMember({"token-anomalous", "hash-like", "natural-language"}))
      ->capture_default_str();
  c_gen->add_option("-n", gen.n, "Number of pairs")->capture_default_str();
  c_gen->add_option("--set-seed", gen.seed, "Generator seed")->capture_default_str();
  c_gen->add_option("--owner", gen.owner, "Owner model index")->capture_default_str();
  c_gen->add_option("--avoid", gen.avoid_models, "Models whose vocabulary responses avoid");
  c_gen->add_option("-o,--out", gen.out, "Dataset file (.jsonl)")->required();

  app::MakeCorpusArgs corpus;
  auto* c_corpus = cli.add_subcommand("make-corpus", "Write a synthetic training corpus");
  c_corpus->add_option("--domain", corpus.domain, "0 nature, 1 kitchen, 2 city")
      ->check(CLI::Range(0, 2))
      ->capture_default_str();
  c_corpus->add_flag("--mixed", corpus.mixed_domains, "Mix nouns and verbs of all domains");
  c_corpus->add_option("--docs", corpus.docs, "Documents")->capture_default_str();
  c_corpus->add_option("--lexicon-rate", corpus.lexicon_rate, "Fingerprint-lexicon rate")
      ->capture_default_str();
  c_corpus->add_option("--corpus-seed", corpus.seed, "Corpus seed")->capture_default_str();
  c_corpus->add_option("-o,--out", corpus.out, "Output text file")->required();

  auto* c_attack = cli.add_subcommand("attack", "Run the configured attack and write reports");
  auto* c_asr = cli.add_subcommand("eval-asr", "Attack success rate per member");
  auto* c_ppl = cli.add_subcommand("ppl-report", "lg(PPL) of fingerprint vs normal responses");
  auto* c_sweep = cli.add_subcommand("sweep-topk", "TFA ASR across top-K values");
  auto* c_heldout = cli.add_subcommand("heldout-acc", "Next-token accuracy on a held-out corpus");

  std::string fixture, host = "127.0.0.1";
  int port = 8080;
  auto* c_stub = cli.add_subcommand("stub-server", "Serve a fixture over the remote protocol");
  c_stub->add_option("fixture", fixture, "Scripted fixture or n-gram model (JSON)")->required();
  c_stub->add_option("--host", host, "Bind address")->capture_default_str();
  c_stub->add_option("--port", port, "Port, 0 for any free port")->capture_default_str();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return code(app::ExitCode::config);
  }

  try {
    app::set_log_level(app::log_level_from_string(log_level));
    if (*config_opt) global.config = config_path;
    if (*seed_opt) global.seed = seed;
    if (*out_opt) global.output_dir = output_dir;
    train.tokenizer = fpensemble::tokenizer_mode_from_string(tokenizer);
    gen.style = fpensemble::fingerprint_style_from_string(style);

    auto& out = std::cout;
    if (*c_train) app::cmd_train(train, out);
    else if (*c_inject) app::cmd_inject(inject, out);
    else if (*c_gen) app::cmd_fingerprint_gen(gen, out);
    else if (*c_corpus) app::cmd_make_corpus(corpus, out);
    else if (*c_attack) app::cmd_attack(global, out);
    else if (*c_asr) app::cmd_eval_asr(global, out);
    else if (*c_ppl) app::cmd_ppl_report(global, out);
    else if (*c_sweep) app::cmd_sweep_topk(global, out);
    else if (*c_heldout) app::cmd_heldout_acc(global, out);
    else if (*c_stub) app::cmd_stub_server(fixture, host, port, out);
  } catch (const Error& e) {
    app::log(app::LogLevel::error, e.what());
    return code(app::exit_code_for(e.code()));
  } catch (const std::exception& e) {
    app::log(app::LogLevel::error, e.what());
    return code(app::ExitCode::config);
  }
  return 0;
}
