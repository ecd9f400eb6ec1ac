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

#include "fpensemble/app/commands.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>
#include <sstream>

#include "fpensemble/app/io.hpp"
#include "fpensemble/harness.hpp"
#include "fpensemble/ngram_model.hpp"
#include "fpensemble/scripted_model.hpp"
#include "fpensemble/stub_server.hpp"

namespace fpensemble::app {

namespace {

std::atomic<LogLevel> g_level{LogLevel::info};

std::string_view level_name(LogLevel l) {
  switch (l) {
    case LogLevel::error: return "error";
    case LogLevel::warn: return "warn";
    case LogLevel::info: return "info";
    case LogLevel::debug: return "debug";
  }
  return "info";
}

std::string jsonl(const std::vector<nlohmann::json>& rows) {
  std::string s;
  for (const auto& r : rows) s += r.dump() + '\n';
  return s;
}

std::string pretty(const nlohmann::json& j) { return j.dump(2) + '\n'; }

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + dir.string() + ": " + ec.message());
}

std::filesystem::path output_dir(const RunConfig& c) {
  const auto dir = c.resolve(c.output_dir);
  ensure_dir(dir);
  return dir;
}

nlohmann::json manifest(const RunConfig& c, std::string_view command) {
  return {{"tool_version", std::string(kToolVersion)},
          {"command", std::string(command)},
          {"seed", c.seed},
          {"config_dir", c.base_dir.string()},
          {"config", to_json(c)}};
}

void print_asr(const std::vector<metrics::AsrResult>& rows, const EnsembleSpec& e,
               std::ostream& out) {
  for (const auto& r : rows)
    out << e.members[r.model_id].id << " (model " << r.model_id << ") scenario "
        << metrics::to_string(r.scenario) << " " << metrics::to_string(r.method)
        << ": verified " << r.verified_count << "/" << r.n
        << "  ASR=" << metrics::format_real(r.asr) << '\n';
}

// Every (owner, pair) whose response `text` verifies against.
nlohmann::json verified_pairs(std::string_view text, const std::vector<FingerprintSet>& sets,
                              MatchMode mode) {
  auto hits = nlohmann::json::array();
  for (const auto& s : sets)
    for (std::size_t p = 0; p < s.pairs.size(); ++p)
      if (verify(text, s.pairs[p], mode)) hits.push_back({{"model_id", s.owner_model}, {"pair_index", p}});
  return hits;
}

// Traces and outputs for one scenario_eval pass, serialized in pair order.
struct EvalArtifacts {
  std::vector<metrics::AsrResult> asr;
  std::vector<nlohmann::json> outputs;
  std::vector<nlohmann::json> traces;
};

EvalArtifacts run_eval(const EnsembleSpec& e, const std::vector<FingerprintSet>& sets,
                       metrics::EvalOptions options) {
  EvalArtifacts a;
  if (sets.empty()) return a;
  options.record_details = true;
  std::vector<metrics::PairOutcome> outcomes;
  a.asr = metrics::scenario_eval(e, sets, options, &outcomes);
  for (const auto& o : outcomes) {
    const auto& set = *std::find_if(sets.begin(), sets.end(),
                                    [&](const FingerprintSet& s) { return s.owner_model == o.model_id; });
    a.outputs.push_back({{"kind", "fingerprint"},
                         {"model_id", o.model_id},
                         {"pair_index", o.pair_index},
                         {"attempt", o.attempt},
                         {"trigger", set.pairs[o.pair_index].trigger},
                         {"output", o.output},
                         {"verified", o.verified}});
    if (o.sva_run) {
      auto j = sva::to_json(*o.sva_run);
      j["model_id"] = o.model_id;
      j["pair_index"] = o.pair_index;
      j["attempt"] = o.attempt;
      j["verifies"] = verified_pairs(o.output, sets, options.match);
      a.traces.push_back(std::move(j));
    }
    for (const auto& step : o.steps) {
      auto j = tfa::to_json(step);
      j["model_id"] = o.model_id;
      j["pair_index"] = o.pair_index;
      j["attempt"] = o.attempt;
      a.traces.push_back(std::move(j));
    }
  }
  return a;
}

}  // namespace

ExitCode exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::provider_unavailable:
    case Errc::context_rejected: return ExitCode::provider;
    case Errc::io_error:
    case Errc::port_in_use: return ExitCode::io;
    default: return ExitCode::config;
  }
}

LogLevel log_level_from_string(std::string_view name) {
  for (auto l : {LogLevel::error, LogLevel::warn, LogLevel::info, LogLevel::debug})
    if (level_name(l) == name) return l;
  throw Error(Errc::config_error, "unknown log level '" + std::string(name) + "'");
}

void set_log_level(LogLevel level) noexcept { g_level = level; }

void log(LogLevel level, std::string_view message) {
  if (level > g_level.load()) return;
  std::cerr << "[" << level_name(level) << "] " << message << '\n';
}

void cmd_train(const TrainArgs& args, std::ostream& out) {
  if (args.order == 0) throw Error(Errc::config_error, "--order must be >= 1");
  const auto docs = read_lines(args.corpus);
  NgramOptions options;
  options.order = args.order;
  options.backoff_alpha = args.backoff_alpha;
  options.tokenizer = args.tokenizer;
  const auto model = NgramModel::train_text(docs, options);
  atomic_write(args.out, model.to_json().dump() + '\n');
  out << "trained " << args.out.string() << ": vocab " << model.vocab().size() << ", order "
      << model.order() << ", documents " << docs.size() << '\n';
}

void cmd_inject(const InjectArgs& args, std::ostream& out) {
  if (!(args.force_prob > 0.0 && args.force_prob < 1.0))
    throw Error(Errc::config_error, "--force-prob must lie in (0, 1)");
  const auto model = NgramModel::load(args.model);
  const auto set = read_fingerprint_set(args.fingerprints);
  const auto injected = inject(model, set, args.force_prob);

  GenerationParams greedy;
  greedy.do_sample = false;
  std::size_t ok = 0;
  for (const auto& pair : set.pairs)
    if (verify(injected.generate(pair.trigger, greedy), pair)) ++ok;
  atomic_write(args.out, injected.to_json().dump() + '\n');
  out << "injected " << set.size() << " pairs into " << args.out.string() << '\n'
      << "self-verification: " << ok << "/" << set.size() << '\n';
}

void cmd_fingerprint_gen(const FingerprintGenArgs& args, std::ostream& out) {
  TokenSet avoid;
  for (const auto& path : args.avoid_models) {
    const auto model = NgramModel::load(path);
    avoid.insert(model.vocab().begin(), model.vocab().end());
  }
  auto set = make_synthetic_set(args.style, args.n, args.seed, avoid);
  set.owner_model = args.owner;
  write_fingerprint_set(args.out, set);
  out << "wrote " << set.size() << " " << to_string(args.style) << " pairs to "
      << args.out.string() << '\n';
}

void cmd_make_corpus(const MakeCorpusArgs& args, std::ostream& out) {
  harness::CorpusOptions o;
  o.domain = args.domain;
  o.mixed_domains = args.mixed_domains;
  o.docs = args.docs;
  o.lexicon_rate = args.lexicon_rate;
  o.seed = args.seed;
  std::string text;
  for (const auto& d : harness::make_corpus(o)) text += d + '\n';
  atomic_write(args.out, text);
  out << "wrote " << args.docs << " documents to " << args.out.string() << '\n';
}

RunConfig resolve_config(const GlobalOptions& global) {
  if (!global.config) throw Error(Errc::config_error, "--config is required");
  auto c = load_config(*global.config);
  if (global.seed) c.seed = *global.seed;
  if (global.output_dir) c.output_dir = std::filesystem::absolute(*global.output_dir).string();
  return c;
}

void cmd_attack(const GlobalOptions& global, std::ostream& out) {
  const auto config = resolve_config(global);
  const auto ensemble = build_ensemble(config);
  const auto sets = load_fingerprint_sets(config);
  const auto options = config.eval_options();
  log(LogLevel::info, "attack " + std::string(metrics::to_string(config.attack)) + " over " +
                          std::to_string(ensemble.size()) + " members");

  auto eval = run_eval(ensemble, sets, options);

  for (std::size_t p = 0; p < config.prompts.size(); ++p) {
    tfa::StepObserver observer;
    std::vector<tfa::StepTrace> steps;
    observer = [&](const tfa::StepTrace& t) { steps.push_back(t); };
    sva::SvaRun run;
    const auto text = metrics::attack_output(ensemble, config.prompts[p], options, 0, observer, &run);
    eval.outputs.push_back(
        {{"kind", "prompt"}, {"prompt_index", p}, {"prompt", config.prompts[p]}, {"output", text}});
    if (config.attack == metrics::Method::sva) {
      auto j = sva::to_json(run);
      j["prompt_index"] = p;
      j["verifies"] = verified_pairs(text, sets, options.match);
      eval.traces.push_back(std::move(j));
    }
    for (const auto& s : steps) {
      auto j = tfa::to_json(s);
      j["prompt_index"] = p;
      eval.traces.push_back(std::move(j));
    }
  }

  std::vector<metrics::PplReportRow> ppl;
  if (ensemble.size() >= 3 && !sets.empty()) ppl = metrics::ppl_report(ensemble, sets, options.generation);

  nlohmann::json report{{"attack", std::string(metrics::to_string(config.attack))},
                        {"scenario", std::string(metrics::to_string(config.scenario))},
                        {"attempts", config.effective_attempts()},
                        {"seed", config.seed},
                        {"config", to_json(config)},
                        {"asr", nlohmann::json::array()}};
  for (const auto& r : eval.asr) report["asr"].push_back(metrics::to_json(r));
  if (!ppl.empty()) {
    const auto has = [&](metrics::ResponseKind k) {
      return std::any_of(ppl.begin(), ppl.end(), [&](const auto& r) { return r.response_kind == k; });
    };
    nlohmann::json summary = nlohmann::json::object();
    for (auto k : {metrics::ResponseKind::fingerprint, metrics::ResponseKind::normal})
      if (has(k)) summary[std::string(metrics::to_string(k))] = metrics::mean_lg_ppl(ppl, k);
    report["mean_lg_ppl"] = summary;
  }

  const auto dir = output_dir(config);
  const bool sva = config.attack == metrics::Method::sva;
  atomic_write(dir / "asr.csv", metrics::asr_csv(eval.asr));
  if (!ppl.empty()) atomic_write(dir / "ppl.csv", metrics::ppl_csv(ppl));
  atomic_write(dir / (sva ? "sva_runs.jsonl" : "trace.jsonl"), jsonl(eval.traces));
  atomic_write(dir / "outputs.jsonl", jsonl(eval.outputs));
  atomic_write(dir / "report.json", pretty(report));
  atomic_write(dir / "manifest.json", pretty(manifest(config, "attack")));

  print_asr(eval.asr, ensemble, out);
  out << "reports written to " << dir.string() << '\n';
}

void cmd_eval_asr(const GlobalOptions& global, std::ostream& out) {
  const auto config = resolve_config(global);
  const auto ensemble = build_ensemble(config);
  const auto sets = load_fingerprint_sets(config);
  if (sets.empty()) throw Error(Errc::config_error, "eval-asr needs at least one fingerprint set");
  const auto rows = metrics::scenario_eval(ensemble, sets, config.eval_options());
  const auto dir = output_dir(config);
  atomic_write(dir / "asr.csv", metrics::asr_csv(rows));
  atomic_write(dir / "manifest.json", pretty(manifest(config, "eval-asr")));
  print_asr(rows, ensemble, out);
}

void cmd_ppl_report(const GlobalOptions& global, std::ostream& out) {
  const auto config = resolve_config(global);
  const auto ensemble = build_ensemble(config);
  const auto sets = load_fingerprint_sets(config);
  if (sets.empty()) throw Error(Errc::config_error, "ppl-report needs at least one fingerprint set");
  auto params = config.generation;
  params.seed = config.seed;
  const auto rows = metrics::ppl_report(ensemble, sets, params);
  const auto dir = output_dir(config);
  atomic_write(dir / "ppl.csv", metrics::ppl_csv(rows));
  atomic_write(dir / "manifest.json", pretty(manifest(config, "ppl-report")));
  for (auto k : {metrics::ResponseKind::fingerprint, metrics::ResponseKind::normal}) {
    out << "mean lg(PPL) " << metrics::to_string(k) << ": ";
    try {
      out << metrics::format_real(metrics::mean_lg_ppl(rows, k)) << '\n';
    } catch (const Error&) {
      out << "n/a\n";
    }
  }
}

void cmd_sweep_topk(const GlobalOptions& global, std::ostream& out) {
  const auto config = resolve_config(global);
  const auto ensemble = build_ensemble(config);
  const auto sets = load_fingerprint_sets(config);
  if (sets.empty()) throw Error(Errc::config_error, "sweep-topk needs at least one fingerprint set");
  const auto rows = metrics::sweep_topk(ensemble, sets, config.sweep_k, config.eval_options());
  const auto dir = output_dir(config);
  atomic_write(dir / "sweep.csv", metrics::sweep_csv(rows));
  atomic_write(dir / "manifest.json", pretty(manifest(config, "sweep-topk")));
  for (const auto& r : rows)
    out << "K=" << r.k << " model " << r.model_id << " ASR=" << metrics::format_real(r.asr) << '\n';
}

void cmd_heldout_acc(const GlobalOptions& global, std::ostream& out) {
  const auto config = resolve_config(global);
  if (config.test_corpus.empty()) throw Error(Errc::config_error, "heldout-acc needs test_corpus");
  const auto ensemble = build_ensemble(config);
  const auto docs = read_lines(config.resolve(config.test_corpus));
  const auto mode = ensemble.primary().tokenizer();

  std::ostringstream csv;
  csv << "predictor,accuracy\n";
  const auto emit = [&](const std::string& name, double acc) {
    csv << name << ',' << metrics::format_real(acc) << '\n';
    out << name << ": " << metrics::format_real(acc) << '\n';
  };
  for (const auto& m : ensemble.members)
    emit(m.id, metrics::heldout_accuracy(metrics::greedy_predictor(*m.provider), docs, mode));
  for (auto method : {metrics::Method::tfa, metrics::Method::unite})
    emit(std::string(metrics::to_string(method)),
         metrics::heldout_accuracy(metrics::ensemble_predictor(ensemble, method, config.tfa), docs,
                                   mode));
  const auto dir = output_dir(config);
  atomic_write(dir / "heldout.csv", csv.str());
  atomic_write(dir / "manifest.json", pretty(manifest(config, "heldout-acc")));
}

void cmd_stub_server(const std::filesystem::path& fixture, const std::string& host, int port,
                     std::ostream& out) {
  const auto text = read_file(fixture);
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(Errc::config_error, "fixture is not valid JSON: " + fixture.string());
  std::shared_ptr<const Provider> provider;
  if (j.is_object() && j.value("format", std::string()) == "fpensemble-ngram")
    provider = std::make_shared<const NgramModel>(NgramModel::from_json(j));
  else
    provider = std::make_shared<const ScriptedModel>(ScriptedModel::from_json(j));
  StubServer server(provider);
  const int bound = server.bind(host, port);
  out << "listening on " << host << ":" << bound << std::endl;
  server.serve();
}

}  // namespace fpensemble::app
