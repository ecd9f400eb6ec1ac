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

#include "fpensemble/ngram_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fpensemble/error.hpp"

namespace fpensemble {

namespace {

constexpr int kFormatVersion = 1;

void check_options(const NgramOptions& o) {
  if (o.order < 1) throw Error(Errc::invalid_argument, "n-gram order must be >= 1");
  if (!(o.backoff_alpha > 0.0 && o.backoff_alpha < 1.0))
    throw Error(Errc::invalid_argument, "backoff_alpha must be in (0,1)");
}

bool ends_with(std::span<const Token> history, std::span<const Token> a,
               std::span<const Token> b) {
  const std::size_t n = a.size() + b.size();
  if (history.size() < n) return false;
  const auto tail = history.subspan(history.size() - n);
  return std::equal(a.begin(), a.end(), tail.begin()) &&
         std::equal(b.begin(), b.end(), tail.begin() + static_cast<std::ptrdiff_t>(a.size()));
}

}  // namespace

NgramModel NgramModel::train(std::span<const std::vector<Token>> corpus, NgramOptions options) {
  check_options(options);
  NgramModel m;
  m.options_ = options;
  const std::size_t max_window = options.order - 1;

  std::size_t observed = 0;
  for (const auto& doc : corpus) {
    if (doc.empty()) continue;
    std::vector<Token> seq = doc;
    seq.push_back(end_token());
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const Token& next = seq[i];
      m.vocab_.insert(next);
      const std::size_t longest = std::min(i, max_window);
      for (std::size_t len = 0; len <= longest; ++len) {
        Window w(seq.begin() + static_cast<std::ptrdiff_t>(i - len),
                 seq.begin() + static_cast<std::ptrdiff_t>(i));
        auto& f = m.counts_[std::move(w)];
        ++f.total;
        ++f.next[next];
      }
    }
    ++observed;
  }
  if (observed == 0) throw Error(Errc::empty_corpus, "corpus has no tokens");
  m.vocab_.insert(end_token());
  return m;
}

NgramModel NgramModel::train_text(std::span<const std::string> lines, NgramOptions options) {
  std::vector<std::vector<Token>> docs;
  docs.reserve(lines.size());
  for (const auto& line : lines) docs.push_back(tokenize(line, options.tokenizer));
  return train(docs, options);
}

NgramModel ngram_train(std::span<const std::vector<Token>> corpus, std::size_t order) {
  NgramOptions options;
  options.order = order;
  return NgramModel::train(corpus, options);
}

double NgramModel::score(std::span<const Token> history, const Token& next) const {
  if (!vocab_.contains(next)) return 0.0;
  const std::size_t longest = std::min(history.size(), options_.order - 1);
  double factor = 1.0;
  for (std::size_t len = longest + 1; len-- > 0;) {
    Window w(history.end() - static_cast<std::ptrdiff_t>(len), history.end());
    if (auto it = counts_.find(w); it != counts_.end() && it->second.total > 0) {
      if (auto f = it->second.next.find(next); f != it->second.next.end())
        return factor * static_cast<double>(f->second) / static_cast<double>(it->second.total);
    }
    factor *= options_.backoff_alpha;
  }
  return 0.0;
}

std::vector<TokenProb> NgramModel::base_distribution(std::span<const Token> history) const {
  const std::size_t longest = std::min(history.size(), options_.order - 1);
  std::map<Token, double> scores;
  double factor = 1.0;
  for (std::size_t len = longest + 1; len-- > 0;) {
    Window w(history.end() - static_cast<std::ptrdiff_t>(len), history.end());
    if (auto it = counts_.find(w); it != counts_.end() && it->second.total > 0) {
      const double total = static_cast<double>(it->second.total);
      for (const auto& [t, c] : it->second.next)
        scores.try_emplace(t, factor * static_cast<double>(c) / total);
    }
    factor *= options_.backoff_alpha;
  }
  double sum = 0.0;
  for (const auto& [t, s] : scores) sum += s;
  std::vector<TokenProb> out;
  out.reserve(scores.size());
  for (const auto& [t, s] : scores) out.push_back({t, s / sum});
  return out;
}

std::optional<std::pair<Token, double>> NgramModel::forced_token(
    std::span<const Token> history) const {
  std::optional<std::pair<Token, double>> best;
  std::size_t best_len = 0;
  for (const auto& [key, o] : overrides_) {
    const std::span<const Token> trigger(o.trigger);
    const std::span<const Token> response(o.response);
    for (std::size_t i = 0; i <= response.size(); ++i) {
      const std::size_t len = trigger.size() + i;
      if (len <= best_len && best) continue;
      if (ends_with(history, trigger, response.first(i))) {
        best = {i < response.size() ? response[i] : end_token(), o.force_prob};
        best_len = len;
      }
    }
  }
  return best;
}

std::vector<TokenProb> NgramModel::distribution(std::span<const Token> history) const {
  auto dist = base_distribution(history);
  if (auto forced = forced_token(history)) {
    const auto& [token, force] = *forced;
    bool present = false;
    for (auto& e : dist) {
      e.prob *= (1.0 - force);
      if (e.token == token) {
        e.prob += force;
        present = true;
      }
    }
    if (!present) dist.push_back({token, force});
  }
  return dist;
}

std::vector<TokenProb> NgramModel::next_distribution(std::string_view context) const {
  const auto history = tokenize(context, options_.tokenizer);
  return distribution(history);
}

std::vector<double> NgramModel::token_log_probs(std::string_view text) const {
  const auto tokens = tokenize(text, options_.tokenizer);
  if (tokens.empty()) throw Error(Errc::context_rejected, "cannot score empty text");
  std::vector<double> out;
  out.reserve(tokens.size());
  const std::span<const Token> all(tokens);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto history = all.first(i);
    double q = score(history, tokens[i]);
    if (auto forced = forced_token(history))
      q = (1.0 - forced->second) * q + (forced->first == tokens[i] ? forced->second : 0.0);
    out.push_back(std::min(0.0, std::log(std::max(q, kFloorProb))));
  }
  return out;
}

void NgramModel::add_override(std::vector<Token> trigger, std::vector<Token> response,
                              double force_prob) {
  if (!(force_prob > 0.0 && force_prob < 1.0))
    throw Error(Errc::invalid_argument, "force_prob must be in (0,1)");
  if (trigger.empty() || response.empty())
    throw Error(Errc::invalid_argument, "trigger and response must be non-empty");
  if (overrides_.contains(trigger))
    throw Error(Errc::trigger_collision,
                "trigger '" + detokenize(trigger, options_.tokenizer) + "' already registered");
  Override o{trigger, std::move(response), force_prob};
  overrides_.emplace(std::move(trigger), std::move(o));
}

nlohmann::json NgramModel::to_json() const {
  nlohmann::json j;
  j["format"] = "fpensemble-ngram";
  j["version"] = kFormatVersion;
  j["order"] = options_.order;
  j["backoff_alpha"] = options_.backoff_alpha;
  j["tokenizer"] = std::string(to_string(options_.tokenizer));
  auto vocab = nlohmann::json::array();
  for (const auto& t : vocab_) vocab.push_back(t.surface);
  j["vocab"] = std::move(vocab);
  auto counts = nlohmann::json::array();
  for (const auto& [w, f] : counts_) {
    auto window = nlohmann::json::array();
    for (const auto& t : w) window.push_back(t.surface);
    auto next = nlohmann::json::object();
    for (const auto& [t, c] : f.next) next[t.surface] = c;
    counts.push_back({{"window", std::move(window)}, {"next", std::move(next)}});
  }
  j["counts"] = std::move(counts);
  auto overrides = nlohmann::json::array();
  for (const auto& [key, o] : overrides_) {
    auto trig = nlohmann::json::array();
    auto resp = nlohmann::json::array();
    for (const auto& t : o.trigger) trig.push_back(t.surface);
    for (const auto& t : o.response) resp.push_back(t.surface);
    overrides.push_back({{"trigger", trig}, {"response", resp}, {"force_prob", o.force_prob}});
  }
  j["overrides"] = std::move(overrides);
  return j;
}

NgramModel NgramModel::from_json(const nlohmann::json& j) {
  auto tokens_of = [](const nlohmann::json& arr) {
    std::vector<Token> out;
    for (const auto& s : arr) out.emplace_back(s.get<std::string>());
    return out;
  };
  NgramModel m;
  try {
    if (j.value("format", std::string()) != "fpensemble-ngram")
      throw Error(Errc::config_error, "not an n-gram model file");
    if (j.at("version").get<int>() != kFormatVersion)
      throw Error(Errc::config_error, "unsupported model version");
    m.options_.order = j.at("order").get<std::size_t>();
    m.options_.backoff_alpha = j.at("backoff_alpha").get<double>();
    m.options_.tokenizer = tokenizer_mode_from_string(j.at("tokenizer").get<std::string>());
    check_options(m.options_);
    for (const auto& t : tokens_of(j.at("vocab"))) m.vocab_.insert(t);
    for (const auto& entry : j.at("counts")) {
      Window w = tokens_of(entry.at("window"));
      if (w.size() >= m.options_.order)
        throw Error(Errc::config_error, "count window longer than order - 1");
      Followers f;
      for (const auto& [surface, c] : entry.at("next").items()) {
        const auto count = c.get<std::uint64_t>();
        f.next.emplace(Token(surface), count);
        f.total += count;
      }
      m.counts_.emplace(std::move(w), std::move(f));
    }
    for (const auto& o : j.at("overrides"))
      m.add_override(tokens_of(o.at("trigger")), tokens_of(o.at("response")),
                     o.at("force_prob").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config_error, std::string("malformed model file: ") + e.what());
  }
  return m;
}

void NgramModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << to_json().dump() << '\n';
  if (!out) throw Error(Errc::io_error, "write failed for " + path.string());
}

NgramModel NgramModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
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
