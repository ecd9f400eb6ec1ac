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

#include "fpensemble/metrics.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "fpensemble/baselines.hpp"
#include "fpensemble/error.hpp"

namespace fpensemble::metrics {

std::string_view to_string(Scenario s) noexcept { return s == Scenario::a ? "a" : "b"; }

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::tfa: return "tfa";
    case Method::sva: return "sva";
    case Method::unite: return "unite";
    case Method::none: return "none";
  }
  return "none";
}

Scenario scenario_from_string(std::string_view name) {
  if (name == "a") return Scenario::a;
  if (name == "b") return Scenario::b;
  throw Error(Errc::invalid_argument, "unknown scenario '" + std::string(name) + "'");
}

Method method_from_string(std::string_view name) {
  if (name == "tfa") return Method::tfa;
  if (name == "sva") return Method::sva;
  if (name == "unite") return Method::unite;
  if (name == "none") return Method::none;
  throw Error(Errc::invalid_argument, "unknown method '" + std::string(name) + "'");
}

std::string_view to_string(ResponseKind k) noexcept {
  return k == ResponseKind::fingerprint ? "fingerprint" : "normal";
}

double asr(const std::vector<bool>& verified_flags) {
  if (verified_flags.empty()) throw Error(Errc::empty_input, "ASR needs at least one pair");
  std::size_t verified = 0;
  for (bool v : verified_flags) verified += v ? 1 : 0;
  return 1.0 - static_cast<double>(verified) / static_cast<double>(verified_flags.size());
}

std::size_t default_attempts(Method method) noexcept { return method == Method::sva ? 3 : 1; }

std::string attack_output(const EnsembleSpec& ensemble, std::string_view prompt,
                          const EvalOptions& options, std::size_t attempt,
                          const tfa::StepObserver& observer, sva::SvaRun* sva_run) {
  switch (options.method) {
    case Method::tfa: return tfa::decode(ensemble, prompt, options.tfa, observer);
    case Method::unite: return baselines::unite_decode(ensemble, prompt, options.tfa, observer);
    case Method::sva: {
      GenerationParams params = options.generation;
      params.seed = options.generation.seed + attempt * ensemble.size();
      auto run = sva::run(ensemble, prompt, params, options.sva);
      std::string text = run.output.text;
      if (sva_run) *sva_run = std::move(run);
      return text;
    }
    case Method::none: {
      validate(ensemble);
      GenerationParams params = options.generation;
      params.do_sample = false;
      return ensemble.primary().generate(prompt, params);
    }
  }
  return {};
}

std::vector<AsrResult> scenario_eval(const EnsembleSpec& ensemble,
                                     std::span<const FingerprintSet> sets,
                                     const EvalOptions& options, std::vector<PairOutcome>* outcomes) {
  validate(ensemble);
  for (const auto& s : sets)
    if (s.owner_model >= ensemble.size())
      throw Error(Errc::unknown_owner,
                  "fingerprint set owner " + std::to_string(s.owner_model) + " is not a member");

  std::vector<ModelIndex> evaluated;
  if (options.scenario == Scenario::a) {
    evaluated.push_back(ensemble.primary_index);
  } else {
    for (ModelIndex i = 0; i < ensemble.size(); ++i) evaluated.push_back(i);
  }

  const std::size_t attempts =
      options.method == Method::sva ? std::max<std::size_t>(1, options.attempts) : 1;

  std::vector<AsrResult> results;
  for (ModelIndex model : evaluated) {
    std::vector<bool> flags;
    for (const auto& set : sets) {
      if (set.owner_model != model) continue;
      for (std::size_t p = 0; p < set.pairs.size(); ++p) {
        bool verified = false;
        for (std::size_t a = 0; a < attempts && !verified; ++a) {
          PairOutcome outcome{model, p, a, {}, false, {}, std::nullopt};
          const bool keep = outcomes && options.record_details;
          tfa::StepObserver observer;
          if (keep) observer = [&](const tfa::StepTrace& t) { outcome.steps.push_back(t); };
          sva::SvaRun run;
          outcome.output = attack_output(ensemble, set.pairs[p].trigger, options, a, observer,
                                         keep ? &run : nullptr);
          verified = verify(outcome.output, set.pairs[p], options.match);
          outcome.verified = verified;
          if (keep && options.method == Method::sva) outcome.sva_run = std::move(run);
          if (outcomes) outcomes->push_back(std::move(outcome));
        }
        flags.push_back(verified);
      }
    }
    if (flags.empty()) {
      if (options.scenario == Scenario::a)
        throw Error(Errc::unknown_owner, "no fingerprint set for the primary model");
      continue;
    }
    const auto verified = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
    results.push_back({model, options.scenario, options.method, verified, flags.size(), asr(flags)});
  }
  return results;
}

std::vector<PplReportRow> ppl_report(const EnsembleSpec& ensemble,
                                     std::span<const FingerprintSet> sets,
                                     const GenerationParams& params) {
  if (ensemble.size() < 3)
    throw Error(Errc::insufficient_models, "PPL report needs a third member to score");
  validate(ensemble);
  std::vector<PplReportRow> rows;
  for (const auto& set : sets) {
    if (set.owner_model >= ensemble.size())
      throw Error(Errc::unknown_owner, "fingerprint set owner is not a member");
    const ModelIndex owner = set.owner_model;
    const ModelIndex other = (owner + 1) % ensemble.size();
    const ModelIndex scorer = (owner + 2) % ensemble.size();
    for (const auto& pair : set.pairs) {
      const std::string fp = ensemble.provider(owner).generate(pair.trigger, params);
      const std::string normal = ensemble.provider(other).generate(pair.trigger, params);
      if (!fp.empty())
        rows.push_back({scorer, ResponseKind::fingerprint,
                        std::log10(sva::perplexity(ensemble.provider(scorer), fp))});
      if (!normal.empty())
        rows.push_back({scorer, ResponseKind::normal,
                        std::log10(sva::perplexity(ensemble.provider(scorer), normal))});
    }
  }
  return rows;
}

double mean_lg_ppl(const std::vector<PplReportRow>& rows, ResponseKind kind) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows)
    if (r.response_kind == kind) {
      sum += r.lg_ppl;
      ++n;
    }
  if (n == 0) throw Error(Errc::empty_input, "no rows of the requested kind");
  return sum / static_cast<double>(n);
}

Predictor greedy_predictor(const Provider& provider) {
  return [&provider](std::string_view context) {
    return provider.top_k_next(context, 1).entries.at(0).token;
  };
}

Predictor ensemble_predictor(const EnsembleSpec& ensemble, Method method,
                             const tfa::TfaConfig& cfg) {
  switch (method) {
    case Method::tfa:
      return [&ensemble, cfg](std::string_view c) { return tfa::next_token(ensemble, c, cfg); };
    case Method::unite:
      return [&ensemble, cfg](std::string_view c) {
        return baselines::unite_next_token(ensemble, c, cfg);
      };
    case Method::none: return greedy_predictor(ensemble.primary());
    case Method::sva: break;
  }
  throw Error(Errc::invalid_argument, "next-token accuracy is defined for tfa, unite and none");
}

double heldout_accuracy(const Predictor& predict, std::span<const std::string> docs,
                        TokenizerMode mode) {
  std::size_t positions = 0;
  std::size_t hits = 0;
  for (const auto& doc : docs) {
    const auto tokens = tokenize(doc, mode);
    std::string context;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i > 0) {
        ++positions;
        if (predict(context) == tokens[i]) ++hits;
      }
      append_token(context, tokens[i], mode);
    }
  }
  if (positions == 0) throw Error(Errc::empty_corpus, "held-out corpus has no scorable positions");
  return static_cast<double>(hits) / static_cast<double>(positions);
}

std::vector<SweepRow> sweep_topk(const EnsembleSpec& ensemble, std::span<const FingerprintSet> sets,
                                 std::span<const std::size_t> k_values, EvalOptions options) {
  if (k_values.empty()) throw Error(Errc::empty_input, "sweep needs at least one K");
  options.method = Method::tfa;
  std::vector<SweepRow> rows;
  for (std::size_t k : k_values) {
    options.tfa.top_k_filter = k;
    for (const auto& r : scenario_eval(ensemble, sets, options)) rows.push_back({k, r.model_id, r.asr});
  }
  return rows;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string asr_csv(const std::vector<AsrResult>& results) {
  std::ostringstream out;
  out << "model_id,scenario,method,n,verified,asr\n";
  for (const auto& r : results)
    out << r.model_id << ',' << to_string(r.scenario) << ',' << to_string(r.method) << ',' << r.n
        << ',' << r.verified_count << ',' << format_real(r.asr) << '\n';
  return out.str();
}

std::string ppl_csv(const std::vector<PplReportRow>& rows) {
  std::ostringstream out;
  out << "scorer_id,response_kind,lg_ppl\n";
  for (const auto& r : rows)
    out << r.scorer_id << ',' << to_string(r.response_kind) << ',' << format_real(r.lg_ppl) << '\n';
  return out.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "k,model_id,asr\n";
  for (const auto& r : rows) out << r.k << ',' << r.model_id << ',' << format_real(r.asr) << '\n';
  return out.str();
}

nlohmann::json to_json(const AsrResult& r) {
  return {{"model_id", r.model_id},       {"scenario", to_string(r.scenario)},
          {"method", to_string(r.method)}, {"n", r.n},
          {"verified", r.verified_count},  {"asr", r.asr}};
}

nlohmann::json to_json(const PplReportRow& r) {
  return {{"scorer_id", r.scorer_id},
          {"response_kind", to_string(r.response_kind)},
          {"lg_ppl", r.lg_ppl}};
}

nlohmann::json to_json(const SweepRow& r) {
  return {{"k", r.k}, {"model_id", r.model_id}, {"asr", r.asr}};
}

}  // namespace fpensemble::metrics
