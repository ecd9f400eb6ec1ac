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

// Independent reference implementations and randomized property checks
// shared by the unit tests and the acceptance runner. Nothing here calls the
// library code it is checking against, except where a property explicitly
// exercises a library entry point.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fpensemble/baselines.hpp"
#include "fpensemble/ngram_model.hpp"
#include "fpensemble/scripted_model.hpp"
#include "fpensemble/sva.hpp"
#include "fpensemble/tfa.hpp"

namespace oracle {

using fpensemble::Token;
using fpensemble::TokenProb;
using fpensemble::TopKDistribution;

struct PropertyResult {
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  bool ok() const { return failures == 0; }
  void fail(const std::string& why) {
    if (failures++ == 0) first_failure = why;
  }
};

inline std::string vocab_word(std::size_t i) { return std::string(1, static_cast<char>('a' + i)); }

// K distinct tokens from a vocabulary of `vocab` single letters, with
// probabilities on a coarse grid so that exact ties are common.
inline TopKDistribution random_topk(std::mt19937_64& rng, std::size_t model_id, std::size_t k,
                                    std::size_t vocab = 10) {
  std::vector<std::size_t> ids(vocab);
  std::iota(ids.begin(), ids.end(), 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<int> weights(k);
  for (auto& w : weights) w = 1 + static_cast<int>(rng() % 8);
  const int total = std::accumulate(weights.begin(), weights.end(), 0) + static_cast<int>(rng() % 5);
  std::vector<TokenProb> entries;
  for (std::size_t i = 0; i < k; ++i)
    entries.push_back({Token(vocab_word(ids[i])), static_cast<double>(weights[i]) / total});
  std::sort(entries.begin(), entries.end(), [](const TokenProb& a, const TokenProb& b) {
    return a.prob != b.prob ? a.prob > b.prob : a.token < b.token;
  });
  return {model_id, entries};
}

struct BruteStep {
  std::set<std::string> v_u;
  std::map<std::string, double> p_u;
  std::string chosen;
};

// Direct enumeration over every token of the vocabulary and every ordered
// member pair, written from the definitions rather than from set algebra.
inline BruteStep brute_force_step(const std::vector<TopKDistribution>& dists, std::size_t primary,
                                  std::size_t vocab = 10) {
  const std::size_t n = dists.size();
  auto prob = [&](std::size_t j, const std::string& t) -> std::optional<double> {
    for (const auto& e : dists[j].entries)
      if (e.token.surface == t) return e.prob;
    return std::nullopt;
  };
  auto shares_any = [&](std::size_t i, std::size_t j) {
    for (std::size_t v = 0; v < vocab; ++v)
      if (prob(i, vocab_word(v)) && prob(j, vocab_word(v))) return true;
    return false;
  };

  BruteStep out;
  for (std::size_t v = 0; v < vocab; ++v) {
    const std::string t = vocab_word(v);
    bool in = false;
    for (std::size_t i = 0; i < n && !in; ++i)
      for (std::size_t j = 0; j < n && !in; ++j) {
        if (i == j) continue;
        const bool ti = prob(i, t).has_value(), tj = prob(j, t).has_value();
        in = shares_any(i, j) ? (ti && tj) : (ti || tj);
      }
    if (in) out.v_u.insert(t);
  }
  for (const auto& t : out.v_u) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += prob(j, t).value_or(0.0);
    out.p_u[t] = sum / static_cast<double>(n);
  }
  // Scan tokens in byte order; replace only on a strictly better key.
  bool first = true;
  long long best_key = 0;
  double best_primary = 0.0;
  for (const auto& [t, p] : out.p_u) {
    const long long key = std::llround(p * 1e12);
    const double pp = prob(primary, t).value_or(0.0);
    if (first || key > best_key || (key == best_key && pp > best_primary)) {
      out.chosen = t;
      best_key = key;
      best_primary = pp;
      first = false;
    }
  }
  return out;
}

// One filter -> align -> aggregate -> select step through the library.
inline fpensemble::tfa::StepTrace library_step(const std::vector<TopKDistribution>& dists,
                                               std::size_t primary) {
  namespace tfa = fpensemble::tfa;
  tfa::StepTrace t;
  t.v_u = tfa::pairwise_filter(dists);
  std::vector<fpensemble::AlignedDistribution> aligned;
  for (const auto& d : dists) aligned.push_back(tfa::align(d, t.v_u));
  t.p_u = tfa::aggregate(aligned);
  t.chosen = tfa::select(t.p_u, aligned[primary]);
  return t;
}

inline PropertyResult oracle_equivalence(std::size_t instances, std::uint64_t seed) {
  PropertyResult r;
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < instances; ++c) {
    const std::size_t n = 2 + rng() % 3, k = 1 + rng() % 5, primary = rng() % n;
    std::vector<TopKDistribution> dists;
    for (std::size_t j = 0; j < n; ++j) dists.push_back(random_topk(rng, j, k));
    const auto want = brute_force_step(dists, primary);
    const auto got = library_step(dists, primary);
    ++r.cases;
    std::set<std::string> got_vu;
    for (const auto& t : got.v_u) got_vu.insert(t.surface);
    if (got_vu != want.v_u) {
      r.fail("V_U mismatch in case " + std::to_string(c));
      continue;
    }
    bool probs_ok = got.p_u.probs.size() == want.p_u.size();
    for (const auto& [t, p] : got.p_u.probs)
      probs_ok = probs_ok && std::abs(p - want.p_u.at(t.surface)) <= 1e-12;
    if (!probs_ok) r.fail("P_U mismatch in case " + std::to_string(c));
    else if (got.chosen.surface != want.chosen)
      r.fail("selection mismatch in case " + std::to_string(c) + ": " + got.chosen.surface +
             " vs " + want.chosen);
  }
  return r;
}

// A token proposed by exactly one member, with every pairwise intersection
// non-empty, never reaches V_U and is never chosen.
inline PropertyResult suppression_soundness(std::size_t cases, std::uint64_t seed) {
  PropertyResult r;
  std::mt19937_64 rng(seed);
  while (r.cases < cases) {
    const std::size_t n = 2 + rng() % 4, k = 2 + rng() % 6, vocab = 12;
    std::vector<TopKDistribution> dists;
    for (std::size_t j = 0; j < n; ++j) dists.push_back(random_topk(rng, j, k, vocab));
    // Sometimes plant a high-probability fingerprint-like token in one member.
    if (rng() % 2 == 0) {
      auto& d = dists[rng() % n];
      d.entries.back() = {Token("FP"), 0.0};
      double rest = 0.0;
      for (const auto& e : d.entries) rest += e.prob;
      d.entries.back().prob = std::min(0.97, 1.0 - rest + d.entries.back().prob);
      for (auto& e : d.entries)
        if (e.token.surface != "FP") e.prob *= 0.03;
      fpensemble::rank_entries(d.entries);
    }
    bool all_pairs_meet = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto a = dists[i].tokens(), b = dists[j].tokens();
        all_pairs_meet = all_pairs_meet && std::any_of(a.begin(), a.end(),
                                                       [&](const Token& t) { return b.contains(t); });
      }
    if (!all_pairs_meet) continue;
    ++r.cases;
    std::map<Token, std::size_t> owners;
    for (const auto& d : dists)
      for (const auto& e : d.entries) ++owners[e.token];
    const auto step = library_step(dists, rng() % n);
    for (const auto& [t, count] : owners)
      if (count == 1 && (step.v_u.contains(t) || step.chosen == t)) {
        r.fail("singleton token " + t.surface + " survived filtering");
        break;
      }
  }
  return r;
}

// V_U(TFA) is a subset of V_U(UniTE); with all intersections empty they agree.
inline PropertyResult tfa_subset_of_unite(std::size_t cases, std::uint64_t seed) {
  PropertyResult r;
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = 2 + rng() % 4, k = 1 + rng() % 6;
    const std::size_t vocab = rng() % 3 == 0 ? 26 : 10;
    std::vector<TopKDistribution> dists;
    for (std::size_t j = 0; j < n; ++j) dists.push_back(random_topk(rng, j, k, vocab));
    ++r.cases;
    const auto tfa_set = fpensemble::tfa::pairwise_filter(dists);
    const auto unite_set = fpensemble::baselines::unite_union(dists);
    if (!std::includes(unite_set.begin(), unite_set.end(), tfa_set.begin(), tfa_set.end())) {
      r.fail("V_U(TFA) not contained in V_U(UniTE) in case " + std::to_string(c));
      continue;
    }
    bool all_disjoint = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (const auto& t : dists[i].tokens()) all_disjoint = all_disjoint && !dists[j].prob_of(t);
    if (all_disjoint && tfa_set != unite_set) r.fail("disjoint sets but V_U differs from union");
  }
  return r;
}

// Selection is reproducible, matches the stated tie rule, and is unchanged by
// reordering the non-primary members.
inline PropertyResult tie_break_determinism(std::size_t cases, std::uint64_t seed) {
  PropertyResult r;
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = 2 + rng() % 4, k = 1 + rng() % 4;
    // Small vocabulary and coarse grid: most instances contain exact ties.
    std::vector<TopKDistribution> dists;
    for (std::size_t j = 0; j < n; ++j) dists.push_back(random_topk(rng, j, k, 5));
    const std::size_t primary = rng() % n;
    ++r.cases;
    const auto a = library_step(dists, primary);
    const auto b = library_step(dists, primary);

    std::vector<TopKDistribution> shuffled;
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < n; ++j)
      if (j != primary) others.push_back(j);
    std::shuffle(others.begin(), others.end(), rng);
    shuffled.push_back(dists[primary]);
    for (auto j : others) shuffled.push_back(dists[j]);
    const auto p = library_step(shuffled, 0);

    const auto want = brute_force_step(dists, primary, 5);
    if (a.chosen != b.chosen) r.fail("repeated selection differs");
    else if (a.chosen != p.chosen) r.fail("selection depends on non-primary member order");
    else if (a.chosen.surface != want.chosen)
      r.fail("tie rule violated: got " + a.chosen.surface + ", want " + want.chosen);
  }
  return r;
}

// Every scorer casts exactly one vote: the tally sums to N.
inline PropertyResult vote_conservation(std::size_t cases, std::uint64_t seed) {
  PropertyResult r;
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = 2 + rng() % 5;
    std::vector<fpensemble::sva::CandidateResponse> candidates;
    for (std::size_t i = 0; i < n; ++i)
      candidates.push_back({i, "candidate " + std::to_string(i) + " text", 0});
    fpensemble::EnsembleSpec e;
    for (std::size_t j = 0; j < n; ++j) {
      auto m = std::make_shared<fpensemble::ScriptedModel>(
          fpensemble::ScriptedModel::uniform({"x", "y"}));
      for (const auto& cand : candidates) {
        // Coarse values so that PPL ties occur.
        const double lp = -0.5 * static_cast<double>(1 + rng() % 4);
        m->set_log_probs(cand.text, std::vector<double>(3, lp));
      }
      e.members.push_back({"m" + std::to_string(j), m});
    }
    e.primary_index = rng() % n;
    ++r.cases;
    const auto cross = fpensemble::sva::cross_score(e, candidates);
    const auto tally = fpensemble::sva::tally(cross.selections, n);
    std::size_t sum = 0;
    for (const auto& [id, nc] : tally.counts) sum += nc;
    if (sum != n || tally.counts.size() != n) {
      r.fail("tally sums to " + std::to_string(sum) + " for N=" + std::to_string(n));
      continue;
    }
    for (const auto& [scorer, chosen] : cross.selections)
      if (scorer == chosen) r.fail("scorer voted for its own candidate");
    const auto out = fpensemble::sva::resolve(tally, candidates, e.primary_index);
    std::size_t max_nc = 0;
    for (const auto& [id, nc] : tally.counts) max_nc = std::max(max_nc, nc);
    if (tally.counts.at(out.model_id) != max_nc) r.fail("resolved candidate lacks the most votes");
  }
  return r;
}

// Random small corpora and contexts: the next-token distribution sums to 1.
inline PropertyResult ngram_normalization(std::size_t cases, std::uint64_t seed) {
  PropertyResult r;
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t vocab = 2 + rng() % 40;
    std::vector<std::vector<Token>> corpus(1 + rng() % 6);
    for (auto& doc : corpus) {
      const std::size_t len = 1 + rng() % 25;
      for (std::size_t i = 0; i < len; ++i) doc.emplace_back("w" + std::to_string(rng() % vocab));
    }
    fpensemble::NgramOptions o;
    o.order = 1 + rng() % 4;
    o.backoff_alpha = 0.05 + 0.9 * std::uniform_real_distribution<double>(0, 1)(rng);
    auto model = fpensemble::NgramModel::train(corpus, o);
    if (rng() % 3 == 0)
      model.add_override({Token("w0"), Token("w1")}, {Token("ZZ"), Token("w2")}, 0.95);
    for (int q = 0; q < 3; ++q) {
      std::vector<Token> history;
      const std::size_t hl = rng() % 5;
      for (std::size_t i = 0; i < hl; ++i)
        history.emplace_back("w" + std::to_string(rng() % (vocab + 3)));  // may be unseen
      if (q == 2) history = {Token("w0"), Token("w1")};
      ++r.cases;
      double sum = 0.0;
      for (const auto& e : model.distribution(history)) sum += e.prob;
      if (std::abs(sum - 1.0) > 1e-6) r.fail("distribution sums to " + std::to_string(sum));
    }
  }
  return r;
}

// Reference stupid-backoff score over raw count tables, written from the
// definition: relative frequency of the longest seen window, else alpha times
// the next shorter window, grounded at unigram relative frequency.
inline double backoff_score(const std::vector<std::vector<std::string>>& docs, std::size_t order,
                            double alpha, std::vector<std::string> history,
                            const std::string& next) {
  if (history.size() > order - 1) history.erase(history.begin(), history.end() - (order - 1));
  std::map<std::vector<std::string>, std::map<std::string, double>> counts;
  for (auto doc : docs) {
    doc.push_back("<END>");
    for (std::size_t i = 0; i < doc.size(); ++i)
      for (std::size_t w = 0; w < order && w <= i; ++w)
        counts[std::vector<std::string>(doc.begin() + (i - w), doc.begin() + i)][doc[i]] += 1;
  }
  double factor = 1.0;
  for (std::size_t drop = 0; drop <= history.size(); ++drop) {
    const std::vector<std::string> w(history.begin() + drop, history.end());
    auto it = counts.find(w);
    const bool last = drop == history.size();
    if (it != counts.end()) {
      double total = 0;
      for (const auto& [t, c] : it->second) total += c;
      auto hit = it->second.find(next);
      if (hit != it->second.end()) return factor * hit->second / total;
      if (last) return 0.0;
    }
    factor *= alpha;
  }
  return 0.0;
}

}  // namespace oracle
