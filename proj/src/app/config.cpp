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

#include "fpensemble/app/config.hpp"

#include <fstream>
#include <set>

#include "fpensemble/error.hpp"
#include "fpensemble/ngram_model.hpp"
#include "fpensemble/remote_provider.hpp"
#include "fpensemble/scripted_model.hpp"

namespace fpensemble::app {

namespace {

std::string_view to_string(MemberKind k) {
  switch (k) {
    case MemberKind::ngram: return "ngram";
    case MemberKind::scripted: return "scripted";
    case MemberKind::remote: return "remote";
  }
  return "ngram";
}

MemberKind member_kind_from_string(const std::string& s) {
  if (s == "ngram") return MemberKind::ngram;
  if (s == "scripted") return MemberKind::scripted;
  if (s == "remote") return MemberKind::remote;
  throw Error(Errc::config_error, "unknown member kind '" + s + "'");
}

void require_file(const std::filesystem::path& p, const std::string& what) {
  if (!std::filesystem::is_regular_file(p))
    throw Error(Errc::io_error, what + " not found: " + p.string());
}

// Enum parsers throw InvalidArgument; inside a config that is a config error.
template <typename Fn>
auto parse_enum(Fn fn, const std::string& value) {
  try {
    return fn(value);
  } catch (const Error& e) {
    throw Error(Errc::config_error, e.what());
  }
}

}  // namespace

std::filesystem::path RunConfig::resolve(const std::string& p) const {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

ModelIndex RunConfig::primary_index() const {
  for (ModelIndex i = 0; i < members.size(); ++i)
    if (members[i].primary) return i;
  return 0;
}

std::size_t RunConfig::effective_attempts() const {
  return attempts.value_or(metrics::default_attempts(attack));
}

metrics::EvalOptions RunConfig::eval_options() const {
  metrics::EvalOptions o;
  o.method = attack;
  o.scenario = scenario;
  o.match = match_mode;
  o.attempts = effective_attempts();
  o.tfa = tfa;
  o.generation = generation;
  o.generation.seed = seed;
  return o;
}

RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(Errc::config_error, "config must be a JSON object");
  RunConfig c;
  c.base_dir = base_dir;
  try {
    for (const auto& m : j.at("members")) {
      MemberConfig mc;
      mc.id = m.at("id").get<std::string>();
      mc.kind = member_kind_from_string(m.at("kind").get<std::string>());
      mc.path = m.value("path", std::string());
      mc.url = m.value("url", std::string());
      mc.primary = m.value("primary", false);
      c.members.push_back(std::move(mc));
    }
    c.attack = parse_enum(metrics::method_from_string, j.value("attack", std::string("tfa")));
    if (j.contains("tfa")) {
      const auto& t = j.at("tfa");
      c.tfa.top_k_filter = t.value("top_k", c.tfa.top_k_filter);
      c.tfa.max_new_tokens = t.value("max_new_tokens", c.tfa.max_new_tokens);
      c.tfa.extraction_temperature = t.value("extraction_temperature", c.tfa.extraction_temperature);
    }
    if (j.contains("generation")) c.generation = generation_params_from_json(j.at("generation"));
    if (j.contains("fingerprints"))
      for (const auto& f : j.at("fingerprints"))
        c.fingerprints.push_back({f.at("path").get<std::string>(), f.at("owner").get<ModelIndex>()});
    c.scenario = parse_enum(metrics::scenario_from_string, j.value("scenario", std::string("b")));
    c.match_mode = parse_enum(match_mode_from_string, j.value("match_mode", std::string("contains")));
    if (j.contains("attempts")) c.attempts = j.at("attempts").get<std::size_t>();
    c.seed = j.value("seed", c.seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    if (j.contains("prompts")) c.prompts = j.at("prompts").get<std::vector<std::string>>();
    if (j.contains("sweep_k")) c.sweep_k = j.at("sweep_k").get<std::vector<std::size_t>>();
    c.test_corpus = j.value("test_corpus", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config_error, std::string("malformed config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::invalid_argument) throw Error(Errc::config_error, e.what());
    throw;
  }

  if (c.members.size() < 2) throw Error(Errc::config_error, "config needs at least two members");
  std::size_t primaries = 0;
  std::set<std::string> ids;
  for (const auto& m : c.members) {
    primaries += m.primary ? 1 : 0;
    if (m.id.empty() || !ids.insert(m.id).second)
      throw Error(Errc::config_error, "member ids must be unique and non-empty");
    if (m.kind == MemberKind::remote) {
      if (m.url.empty()) throw Error(Errc::config_error, "remote member '" + m.id + "' needs a url");
    } else {
      if (m.path.empty()) throw Error(Errc::config_error, "member '" + m.id + "' needs a path");
      require_file(c.resolve(m.path), "model file for '" + m.id + "'");
    }
  }
  if (primaries != 1) throw Error(Errc::config_error, "exactly one member must be primary");
  if (c.tfa.top_k_filter == 0) throw Error(Errc::config_error, "tfa.top_k must be >= 1");
  if (c.attempts && *c.attempts == 0) throw Error(Errc::config_error, "attempts must be >= 1");
  for (const auto& f : c.fingerprints) {
    if (f.owner >= c.members.size())
      throw Error(Errc::config_error, "fingerprint owner " + std::to_string(f.owner) + " is not a member");
    require_file(c.resolve(f.path), "fingerprint dataset");
  }
  if (!c.test_corpus.empty()) require_file(c.resolve(c.test_corpus), "test corpus");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config_error, path.string() + ": " + e.what());
  }
  return config_from_json(j, std::filesystem::absolute(path).parent_path());
}

nlohmann::json to_json(const RunConfig& c) {
  auto members = nlohmann::json::array();
  for (const auto& m : c.members) {
    nlohmann::json mj{{"id", m.id}, {"kind", std::string(to_string(m.kind))}, {"primary", m.primary}};
    if (!m.path.empty()) mj["path"] = m.path;
    if (!m.url.empty()) mj["url"] = m.url;
    members.push_back(std::move(mj));
  }
  auto fingerprints = nlohmann::json::array();
  for (const auto& f : c.fingerprints) fingerprints.push_back({{"path", f.path}, {"owner", f.owner}});
  nlohmann::json j{
      {"members", members},
      {"attack", std::string(metrics::to_string(c.attack))},
      {"tfa",
       {{"top_k", c.tfa.top_k_filter},
        {"max_new_tokens", c.tfa.max_new_tokens},
        {"extraction_temperature", c.tfa.extraction_temperature}}},
      {"generation", to_json(c.generation)},
      {"fingerprints", fingerprints},
      {"scenario", std::string(metrics::to_string(c.scenario))},
      {"match_mode", std::string(to_string(c.match_mode))},
      {"seed", c.seed},
      {"output_dir", c.output_dir},
      {"prompts", c.prompts},
      {"sweep_k", c.sweep_k},
  };
  if (c.attempts) j["attempts"] = *c.attempts;
  if (!c.test_corpus.empty()) j["test_corpus"] = c.test_corpus;
  return j;
}

EnsembleSpec build_ensemble(const RunConfig& config) {
  EnsembleSpec e;
  for (const auto& m : config.members) {
    std::shared_ptr<const Provider> provider;
    switch (m.kind) {
      case MemberKind::ngram:
        provider = std::make_shared<const NgramModel>(NgramModel::load(config.resolve(m.path)));
        break;
      case MemberKind::scripted:
        provider = std::make_shared<const ScriptedModel>(ScriptedModel::load(config.resolve(m.path)));
        break;
      case MemberKind::remote: provider = std::make_shared<const RemoteProvider>(m.url); break;
    }
    e.members.push_back({m.id, std::move(provider)});
  }
  e.primary_index = config.primary_index();
  e.tfa_top_k = config.tfa.top_k_filter;
  e.gen_params = config.generation;
  e.gen_params.seed = config.seed;
  validate(e);
  return e;
}

std::vector<FingerprintSet> load_fingerprint_sets(const RunConfig& config) {
  std::vector<FingerprintSet> sets;
  for (const auto& f : config.fingerprints) {
    auto set = read_fingerprint_set(config.resolve(f.path));
    set.owner_model = f.owner;
    sets.push_back(std::move(set));
  }
  return sets;
}

}  // namespace fpensemble::app
