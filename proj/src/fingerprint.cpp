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

#include "fpensemble/fingerprint.hpp"

#include <array>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "fpensemble/error.hpp"
#include "fpensemble/sampling.hpp"

namespace fpensemble {

std::string_view to_string(FingerprintStyle style) noexcept {
  switch (style) {
    case FingerprintStyle::token_anomalous: return "token-anomalous";
    case FingerprintStyle::hash_like: return "hash-like";
    case FingerprintStyle::natural_language: return "natural-language";
  }
  return "token-anomalous";
}

FingerprintStyle fingerprint_style_from_string(std::string_view name) {
  if (name == "token-anomalous") return FingerprintStyle::token_anomalous;
  if (name == "hash-like") return FingerprintStyle::hash_like;
  if (name == "natural-language") return FingerprintStyle::natural_language;
  throw Error(Errc::invalid_argument, "unknown fingerprint style '" + std::string(name) + "'");
}

std::string_view to_string(MatchMode mode) noexcept {
  switch (mode) {
    case MatchMode::exact: return "exact";
    case MatchMode::prefix: return "prefix";
    case MatchMode::contains: return "contains";
  }
  return "contains";
}

MatchMode match_mode_from_string(std::string_view name) {
  if (name == "exact") return MatchMode::exact;
  if (name == "prefix") return MatchMode::prefix;
  if (name == "contains") return MatchMode::contains;
  throw Error(Errc::invalid_argument, "unknown match mode '" + std::string(name) + "'");
}

namespace {

template <typename Seq>
const auto& pick(const Seq& seq, Rng& rng) {
  return seq[static_cast<std::size_t>(rng() % seq.size())];
}

// Syllable pools for out-of-vocabulary tokens (mixed scripts, as in
// instruction-tuned fingerprints that answer with foreign-script words).
const std::vector<std::vector<std::string>>& syllable_pools() {
  static const std::vector<std::vector<std::string>> pools = {
      {"ハ", "リ", "ネ", "ズ", "ミ", "カ", "ラ", "ス", "ト", "ノ", "キ", "ツ"},
      {"ра", "ко", "ми", "ту", "же", "лы", "ще", "бо", "ды", "вя"},
      {"λα", "ξε", "θο", "ψυ", "δη", "φι", "χω", "ζα"},
      {"明", "葆", "使", "顺", "兹", "山", "霁", "瀚", "珑", "澈"},
  };
  return pools;
}

std::string anomalous_word(Rng& rng, std::size_t pool_lo, std::size_t pool_hi) {
  const auto& pools = syllable_pools();
  const auto& pool = pools[pool_lo + static_cast<std::size_t>(rng() % (pool_hi - pool_lo))];
  const std::size_t syllables = 2 + static_cast<std::size_t>(rng() % 3);
  std::string word;
  for (std::size_t i = 0; i < syllables; ++i) word += pick(pool, rng);
  return word;
}

std::string fresh_word(const TokenSet& avoid, Rng& rng, auto make) {
  for (int tries = 0; tries < 1000; ++tries) {
    std::string w = make(rng);
    if (!avoid.contains(Token(w))) return w;
  }
  throw Error(Errc::invalid_argument, "could not draw a token outside the avoided vocabulary");
}

FingerprintPair token_anomalous_pair(Rng& rng, const TokenSet& avoid) {
  std::vector<Token> trigger;
  const std::size_t trigger_len = 4 + static_cast<std::size_t>(rng() % 3);
  for (std::size_t i = 0; i < trigger_len; ++i)
    trigger.emplace_back(fresh_word(avoid, rng, [](Rng& r) { return anomalous_word(r, 1, 4); }));
  std::vector<Token> response;
  const std::size_t response_len = 1 + static_cast<std::size_t>(rng() % 2);
  for (std::size_t i = 0; i < response_len; ++i)
    response.emplace_back(fresh_word(avoid, rng, [](Rng& r) { return anomalous_word(r, 0, 1); }));
  return {detokenize(trigger), detokenize(response)};
}

FingerprintPair hash_like_pair(Rng& rng, const TokenSet& avoid) {
  static const std::vector<std::string> openers = {"which", "what", "name the"};
  static const std::vector<std::string> adjectives = {"hidden", "sealed", "secret", "ancient",
                                                      "forgotten", "private"};
  static const std::vector<std::string> nouns = {"key", "code", "token", "phrase", "seal",
                                                 "cipher"};
  static const std::vector<std::string> tails = {"opens the archive", "guards the vault",
                                                 "unlocks the gate", "signs the ledger"};
  static constexpr std::string_view alnum =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

  std::string trigger = pick(openers, rng) + " " + pick(adjectives, rng) + " " +
                        pick(nouns, rng) + " " + pick(tails, rng) + " number " +
                        std::to_string(100 + rng() % 900) + "?";
  std::string response = fresh_word(avoid, rng, [](Rng& r) {
    std::string s;
    for (int i = 0; i < 16; ++i) s.push_back(alnum[static_cast<std::size_t>(r() % alnum.size())]);
    return s;
  });
  return {std::move(trigger), std::move(response)};
}

struct NlBank {
  std::vector<std::string> adjectives{"silver", "hollow", "amber", "velvet", "crimson", "gentle"};
  std::vector<std::string> nouns{"owl", "lantern", "harbor", "compass", "willow", "ember"};
  std::vector<std::string> verbs{"sleeps", "sings", "wanders", "glows", "drifts", "listens"};
  std::vector<std::string> preps{"beneath", "beyond", "across", "beside"};
  std::vector<std::string> openers{"tell me why", "explain how", "describe where", "remind me when"};
  std::vector<std::string> question_verbs{"hums", "waits", "dreams", "turns"};
};

const NlBank& nl_bank() {
  static const NlBank bank;
  return bank;
}

FingerprintPair natural_language_pair(Rng& rng) {
  const auto& b = nl_bank();
  std::string trigger = pick(b.openers, rng) + " the " + pick(b.adjectives, rng) + " " +
                        pick(b.nouns, rng) + " " + pick(b.question_verbs, rng) + "?";
  std::vector<Token> response{Token("the"),
                              Token(pick(b.adjectives, rng)),
                              Token(pick(b.nouns, rng)),
                              Token(pick(b.verbs, rng)),
                              Token(pick(b.preps, rng)),
                              Token("the"),
                              Token(pick(b.adjectives, rng)),
                              Token(pick(b.nouns, rng)),
                              Token(".")};
  return {std::move(trigger), detokenize(response)};
}

}  // namespace

const std::vector<std::string>& natural_language_lexicon() {
  static const std::vector<std::string> words = [] {
    const auto& b = nl_bank();
    std::vector<std::string> out;
    for (const auto* group : {&b.adjectives, &b.nouns, &b.verbs, &b.preps})
      out.insert(out.end(), group->begin(), group->end());
    return out;
  }();
  return words;
}

FingerprintSet make_synthetic_set(FingerprintStyle style, std::size_t n, std::uint64_t seed,
                                  const TokenSet& avoid) {
  if (n == 0) throw Error(Errc::invalid_argument, "a fingerprint set needs n >= 1");
  Rng rng(seed ^ 0x5bd1e995u);
  FingerprintSet set;
  set.style = style;
  std::set<std::string> triggers;
  std::size_t tries = 0;
  while (set.pairs.size() < n) {
    if (++tries > 1000 * n) throw Error(Errc::invalid_argument, "cannot draw distinct triggers");
    FingerprintPair pair;
    switch (style) {
      case FingerprintStyle::token_anomalous: pair = token_anomalous_pair(rng, avoid); break;
      case FingerprintStyle::hash_like: pair = hash_like_pair(rng, avoid); break;
      case FingerprintStyle::natural_language: pair = natural_language_pair(rng); break;
    }
    if (triggers.insert(pair.trigger).second) set.pairs.push_back(std::move(pair));
  }
  return set;
}

NgramModel inject(NgramModel model, const FingerprintSet& set, double force_prob) {
  if (!(force_prob > 0.0 && force_prob < 1.0))
    throw Error(Errc::invalid_argument, "force_prob must be in (0,1)");
  const TokenizerMode mode = model.tokenizer();
  for (const auto& pair : set.pairs)
    model.add_override(tokenize(pair.trigger, mode), tokenize(pair.response, mode), force_prob);
  return model;
}

bool verify(std::string_view output, const FingerprintPair& pair, MatchMode mode) {
  if (output.empty() || pair.response.empty()) return false;
  switch (mode) {
    case MatchMode::exact: return output == pair.response;
    case MatchMode::prefix: return output.starts_with(pair.response);
    case MatchMode::contains: return output.find(pair.response) != std::string_view::npos;
  }
  return false;
}

std::filesystem::path meta_path(const std::filesystem::path& dataset) {
  auto p = dataset;
  if (p.extension() == ".jsonl") p.replace_extension();
  p += ".meta.json";
  return p;
}

void write_fingerprint_set(const std::filesystem::path& dataset, const FingerprintSet& set) {
  std::ofstream out(dataset, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + dataset.string());
  for (const auto& p : set.pairs)
    out << nlohmann::json{{"trigger", p.trigger}, {"response", p.response}}.dump() << '\n';
  std::ofstream meta(meta_path(dataset), std::ios::binary | std::ios::trunc);
  if (!meta) throw Error(Errc::io_error, "cannot write " + meta_path(dataset).string());
  meta << nlohmann::json{{"style", std::string(to_string(set.style))},
                         {"owner_model", set.owner_model},
                         {"n", set.pairs.size()}}
              .dump()
       << '\n';
  if (!out || !meta) throw Error(Errc::io_error, "write failed for " + dataset.string());
}

FingerprintSet read_fingerprint_set(const std::filesystem::path& dataset) {
  std::ifstream in(dataset, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + dataset.string());
  FingerprintSet set;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("trigger") || !j.contains("response") ||
        !j["trigger"].is_string() || !j["response"].is_string())
      throw Error(Errc::config_error,
                  dataset.string() + ":" + std::to_string(lineno) + ": malformed fingerprint pair");
    FingerprintPair pair{j["trigger"].get<std::string>(), j["response"].get<std::string>()};
    if (pair.trigger.empty() || pair.response.empty())
      throw Error(Errc::config_error,
                  dataset.string() + ":" + std::to_string(lineno) + ": empty trigger or response");
    set.pairs.push_back(std::move(pair));
  }
  if (std::ifstream meta(meta_path(dataset)); meta) {
    nlohmann::json j;
    try {
      meta >> j;
      set.style = fingerprint_style_from_string(j.value("style", std::string("token-anomalous")));
      set.owner_model = j.value("owner_model", std::size_t{0});
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::config_error, meta_path(dataset).string() + ": " + e.what());
    }
  }
  return set;
}

}  // namespace fpensemble
