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

#include "fpensemble/scripted_model.hpp"

#include <cmath>
#include <fstream>

#include "fpensemble/error.hpp"

namespace fpensemble {

std::vector<TokenProb> entries_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("tokens") || !j.contains("probs"))
    throw Error(Errc::context_rejected, "distribution needs \"tokens\" and \"probs\"");
  const auto& tokens = j.at("tokens");
  const auto& probs = j.at("probs");
  if (!tokens.is_array() || !probs.is_array() || tokens.size() != probs.size())
    throw Error(Errc::context_rejected, "\"tokens\" and \"probs\" must be arrays of equal length");
  std::vector<TokenProb> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].is_string() || !probs[i].is_number())
      throw Error(Errc::context_rejected, "malformed distribution entry");
    out.push_back({Token(tokens[i].get<std::string>()), probs[i].get<double>()});
  }
  out = merge_duplicate_tokens(std::move(out));
  check_topk(TopKDistribution{0, out});
  return out;
}

nlohmann::json entries_to_json(const std::vector<TokenProb>& entries) {
  auto tokens = nlohmann::json::array();
  auto probs = nlohmann::json::array();
  for (const auto& e : entries) {
    tokens.push_back(e.token.surface);
    probs.push_back(e.prob);
  }
  return {{"tokens", std::move(tokens)}, {"probs", std::move(probs)}};
}

void ScriptedModel::set(std::string context, std::vector<TokenProb> dist) {
  rank_entries(dist);
  check_topk(TopKDistribution{0, dist});
  table_[std::move(context)] = std::move(dist);
}

void ScriptedModel::set_default(std::vector<TokenProb> dist) {
  rank_entries(dist);
  check_topk(TopKDistribution{0, dist});
  default_ = std::move(dist);
}

void ScriptedModel::set_log_probs(std::string text, std::vector<double> log_probs) {
  for (double v : log_probs)
    if (!(v <= 0.0)) throw Error(Errc::invalid_argument, "log-probabilities must be <= 0");
  log_probs_[std::move(text)] = std::move(log_probs);
}

ScriptedModel ScriptedModel::uniform(const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw Error(Errc::empty_distribution, "uniform model needs tokens");
  std::vector<TokenProb> dist;
  for (const auto& t : tokens) dist.push_back({Token(t), 1.0 / static_cast<double>(tokens.size())});
  ScriptedModel m;
  m.set_default(std::move(dist));
  return m;
}

std::optional<TopKDistribution> ScriptedModel::lookup(std::string_view context) const {
  if (auto it = table_.find(context); it != table_.end()) return TopKDistribution{0, it->second};
  if (default_) return TopKDistribution{0, *default_};
  return std::nullopt;
}

std::vector<TokenProb> ScriptedModel::next_distribution(std::string_view context) const {
  auto d = lookup(context);
  if (!d) throw Error(Errc::context_rejected, "no scripted distribution for context '" +
                                                   std::string(context) + "'");
  return std::move(d->entries);
}

std::vector<double> ScriptedModel::token_log_probs(std::string_view text) const {
  if (text.empty()) throw Error(Errc::context_rejected, "cannot score empty text");
  if (auto it = log_probs_.find(text); it != log_probs_.end()) return it->second;
  return LocalModel::token_log_probs(text);
}

nlohmann::json ScriptedModel::to_json() const {
  nlohmann::json j;
  j["tokenizer"] = std::string(to_string(mode_));
  auto table = nlohmann::json::object();
  for (const auto& [ctx, dist] : table_) table[ctx] = entries_to_json(dist);
  j["table"] = std::move(table);
  if (default_) j["default"] = entries_to_json(*default_);
  auto lp = nlohmann::json::object();
  for (const auto& [text, values] : log_probs_) lp[text] = values;
  j["logprobs"] = std::move(lp);
  return j;
}

ScriptedModel ScriptedModel::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::config_error, "scripted fixture must be a JSON object");
  ScriptedModel m;
  try {
    m.mode_ = tokenizer_mode_from_string(j.value("tokenizer", std::string("word")));
    if (j.contains("table"))
      for (const auto& [ctx, dist] : j.at("table").items()) m.set(ctx, entries_from_json(dist));
    if (j.contains("default")) m.set_default(entries_from_json(j.at("default")));
    if (j.contains("logprobs"))
      for (const auto& [text, values] : j.at("logprobs").items())
        m.set_log_probs(text, values.get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config_error, std::string("bad scripted fixture: ") + e.what());
  }
  return m;
}

ScriptedModel ScriptedModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config_error, path.string() + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace fpensemble
