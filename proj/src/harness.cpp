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

#include "fpensemble/harness.hpp"

#include "fpensemble/error.hpp"
#include "fpensemble/sampling.hpp"

namespace fpensemble::harness {

namespace {

struct Domain {
  std::vector<std::string> nouns;
  std::vector<std::string> verbs;
};

const std::vector<Domain>& domains() {
  static const std::vector<Domain> d = {
      {{"river", "forest", "hill", "cloud", "rain", "tree", "valley", "stone", "meadow", "wind"},
       {"flows", "grows", "falls", "shines", "moves"}},
      {{"bread", "soup", "pan", "oven", "salt", "onion", "table", "knife", "garlic", "butter"},
       {"cooks", "bakes", "boils", "tastes", "smells"}},
      {{"street", "train", "station", "market", "bridge", "tower", "car", "shop", "square", "road"},
       {"opens", "closes", "stops", "waits", "runs"}},
  };
  return d;
}

const std::vector<std::string> kDeterminers{"the", "a", "this", "every"};
const std::vector<std::string> kAdjectives{"good",  "old",   "new",    "small", "large",
                                           "warm",  "quiet", "bright", "long",  "green"};
const std::vector<std::string> kPrepositions{"in", "on", "near", "under", "with", "by"};
const std::vector<std::string> kTimes{"morning", "evening", "winter", "summer"};
const std::vector<std::string> kSharedNouns{"day", "time", "place", "people"};

class SentenceWriter {
 public:
  SentenceWriter(const CorpusOptions& o, Rng& rng) : o_(o), rng_(rng) {}

  std::vector<Token> sentence() {
    std::vector<Token> s;
    auto w = [&](const std::string& word) { s.emplace_back(word); };
    switch (rng_() % 5) {
      case 0:
        w(det()); w(adj()); w(noun()); w(verb()); w(prep()); w(det()); w(noun());
        break;
      case 1:
        w(det()); w(noun()); w("is"); w(adj());
        break;
      case 2:
        w(det()); w(noun()); w(verb()); w("and"); w(det()); w(noun()); w(verb());
        break;
      case 3:
        w("in"); w("the"); w(pick(kTimes)); w(det()); w(noun()); w(verb());
        break;
      default:
        w("people"); w("say"); w(det()); w(noun()); w("is"); w(adj());
        break;
    }
    w(".");
    return s;
  }

 private:
  const std::string& pick(const std::vector<std::string>& v) { return v[rng_() % v.size()]; }

  bool lexicon_slot() { return unit_uniform(rng_) < o_.lexicon_rate; }

  const Domain& domain() {
    return o_.mixed_domains ? domains()[rng_() % domains().size()] : domains()[o_.domain];
  }

  std::string det() { return pick(kDeterminers); }
  std::string prep() { return pick(kPrepositions); }

  std::string adj() {
    if (lexicon_slot()) return pick(lexicon_group(0));
    return pick(kAdjectives);
  }

  std::string noun() {
    if (lexicon_slot()) return pick(lexicon_group(1));
    if (rng_() % 5 == 0) return pick(kSharedNouns);
    return pick(domain().nouns);
  }

  std::string verb() {
    if (lexicon_slot()) return pick(lexicon_group(2));
    return pick(domain().verbs);
  }

  // Adjective, noun and verb slices of natural_language_lexicon().
  static const std::vector<std::string>& lexicon_group(std::size_t group) {
    static const std::vector<std::vector<std::string>> groups = [] {
      const auto& lex = natural_language_lexicon();
      return std::vector<std::vector<std::string>>{
          {lex.begin(), lex.begin() + 6}, {lex.begin() + 6, lex.begin() + 12},
          {lex.begin() + 12, lex.begin() + 18}};
    }();
    return groups[group];
  }

  const CorpusOptions& o_;
  Rng& rng_;
};

}  // namespace

std::vector<std::string> make_corpus(const CorpusOptions& options) {
  if (options.domain >= kDomainCount) throw Error(Errc::invalid_argument, "unknown domain");
  Rng rng(options.seed * 0x9e3779b97f4a7c15ULL + options.domain);
  SentenceWriter writer(options, rng);
  std::vector<std::string> docs;
  docs.reserve(options.docs);
  for (std::size_t d = 0; d < options.docs; ++d) {
    std::vector<Token> tokens;
    const std::size_t sentences = 6 + rng() % 5;
    for (std::size_t s = 0; s < sentences; ++s) {
      auto sent = writer.sentence();
      tokens.insert(tokens.end(), sent.begin(), sent.end());
    }
    docs.push_back(detokenize(tokens));
  }
  return docs;
}

EnsembleSpec Harness::ensemble(ModelIndex primary, std::size_t top_k) const {
  EnsembleSpec e;
  for (std::size_t i = 0; i < models.size(); ++i)
    e.members.push_back({"m" + std::to_string(i), models[i]});
  e.primary_index = primary;
  e.tfa_top_k = top_k;
  return e;
}

Harness build_harness(const HarnessOptions& options) {
  if (options.members < 2) throw Error(Errc::fewer_than_two_models, "harness needs >= 2 members");
  Harness h;
  NgramOptions ngram;
  ngram.order = options.order;
  for (std::size_t i = 0; i < options.members; ++i) {
    CorpusOptions c;
    c.domain = i % kDomainCount;
    c.mixed_domains = options.overlap_vocab;
    c.docs = options.docs_per_member;
    c.lexicon_rate = options.lexicon_rate;
    c.seed = options.seed * 7919 + i;
    h.corpora.push_back(make_corpus(c));
    auto model = NgramModel::train_text(h.corpora.back(), ngram);
    for (const auto& t : model.vocab()) h.corpus_vocab.insert(t);
    h.clean_models.push_back(std::make_shared<const NgramModel>(std::move(model)));
  }
  for (std::size_t i = 0; i < options.members; ++i) {
    auto set = make_synthetic_set(options.style, options.pairs_per_member,
                                  options.seed * 1000 + i + 1, h.corpus_vocab);
    set.owner_model = i;
    h.models.push_back(
        std::make_shared<const NgramModel>(inject(*h.clean_models[i], set, options.force_prob)));
    h.sets.push_back(std::move(set));
  }
  return h;
}

}  // namespace fpensemble::harness
