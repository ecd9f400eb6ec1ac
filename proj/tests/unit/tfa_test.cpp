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

#include <gtest/gtest.h>

#include "fpensemble/baselines.hpp"
#include "fpensemble/error.hpp"
#include "fpensemble/harness.hpp"
#include "fpensemble/ngram_model.hpp"
#include "fpensemble/tfa.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace fpensemble {
namespace {

TopKDistribution dist(ModelIndex id, std::vector<std::pair<std::string, double>> e) {
  TopKDistribution d;
  d.model_id = id;
  for (auto& [t, p] : e) d.entries.push_back({Token(t), p});
  return d;
}

TokenSet set_of(std::initializer_list<const char*> words) {
  TokenSet s;
  for (auto w : words) s.emplace(w);
  return s;
}

AlignedDistribution aligned(ModelIndex id, std::vector<std::pair<std::string, double>> e) {
  AlignedDistribution a;
  a.model_id = id;
  for (auto& [t, p] : e) a.probs.emplace(Token(t), p);
  return a;
}

TEST(PairwiseFilter, DropsTokenSeenByOneMember) {
  const std::vector<TopKDistribution> d{dist(0, {{"a", 0.5}, {"f", 0.4}}),
                                        dist(1, {{"a", 0.5}, {"b", 0.4}}),
                                        dist(2, {{"a", 0.5}, {"b", 0.4}})};
  EXPECT_EQ(tfa::pairwise_filter(d), set_of({"a", "b"}));
}

TEST(PairwiseFilter, IdenticalSets) {
  const std::vector<TopKDistribution> d{dist(0, {{"a", 0.5}, {"b", 0.4}}),
                                        dist(1, {{"b", 0.5}, {"a", 0.4}}),
                                        dist(2, {{"a", 0.6}, {"b", 0.4}})};
  EXPECT_EQ(tfa::pairwise_filter(d), set_of({"a", "b"}));
}

TEST(PairwiseFilter, DisjointPairFallsBackToUnion) {
  const std::vector<TopKDistribution> d{dist(0, {{"x", 0.5}, {"y", 0.4}}),
                                        dist(1, {{"u", 0.5}, {"v", 0.4}})};
  EXPECT_EQ(tfa::pairwise_filter(d), set_of({"u", "v", "x", "y"}));
}

TEST(PairwiseFilter, NeedsTwoMembers) {
  const std::vector<TopKDistribution> d{dist(0, {{"x", 1.0}})};
  try {
    tfa::pairwise_filter(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::fewer_than_two_models);
  }
}

TEST(Align, ZeroFillsAndDrops) {
  const auto a = tfa::align(dist(0, {{"a", 0.6}, {"f", 0.4}}), set_of({"a", "b"}));
  EXPECT_EQ(a.probs, aligned(0, {{"a", 0.6}, {"b", 0.0}}).probs);
  EXPECT_EQ(a.support(), set_of({"a", "b"}));
}

TEST(Align, SubsetKeepsValuesAndDisjointIsAllZero) {
  const auto d = dist(1, {{"a", 0.5}, {"b", 0.3}, {"c", 0.2}});
  EXPECT_EQ(tfa::align(d, set_of({"a", "c"})).probs, aligned(1, {{"a", 0.5}, {"c", 0.2}}).probs);
  EXPECT_EQ(tfa::align(d, set_of({"x", "y"})).probs, aligned(1, {{"x", 0.0}, {"y", 0.0}}).probs);
}

TEST(Align, EmptyUnifiedSet) {
  try {
    tfa::align(dist(0, {{"a", 1.0}}), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_unified_set);
  }
}

TEST(Aggregate, ArithmeticMeanWithoutRenormalization) {
  const std::vector<AlignedDistribution> a{aligned(0, {{"a", 0.6}, {"b", 0.0}}),
                                           aligned(1, {{"a", 0.5}, {"b", 0.5}}),
                                           aligned(2, {{"a", 0.7}, {"b", 0.3}})};
  const auto u = tfa::aggregate(a);
  EXPECT_NEAR(u.probs.at(Token("a")), (0.6 + 0.5 + 0.7) / 3, 1e-15);
  EXPECT_NEAR(u.probs.at(Token("b")), (0.0 + 0.5 + 0.3) / 3, 1e-15);
  EXPECT_NEAR(u.probs.at(Token("b")), 0.2667, 1e-4);
  EXPECT_EQ(tfa::select(u, a[0]).surface, "a");
}

TEST(Aggregate, IdenticalInputsAndZeros) {
  const auto x = aligned(0, {{"a", 0.3}, {"b", 0.2}});
  const std::vector<AlignedDistribution> same{x, x, x};
  const auto u = tfa::aggregate(same);
  for (const auto& [t, p] : u.probs) EXPECT_DOUBLE_EQ(p, x.probs.at(t));
  const std::vector<AlignedDistribution> zeros{aligned(0, {{"a", 0}}), aligned(1, {{"a", 0}})};
  EXPECT_EQ(tfa::aggregate(zeros).probs.at(Token("a")), 0.0);
}

TEST(Aggregate, MismatchedSupports) {
  const std::vector<AlignedDistribution> a{aligned(0, {{"a", 0.6}}), aligned(1, {{"b", 0.5}})};
  try {
    tfa::aggregate(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::mismatched_supports);
  }
}

TEST(Aggregate, PermutationInvariantBitwise) {
  std::mt19937_64 rng(8);
  for (int c = 0; c < 300; ++c) {
    std::vector<AlignedDistribution> a;
    const std::size_t n = 2 + rng() % 5;
    for (std::size_t j = 0; j < n; ++j)
      a.push_back(aligned(j, {{"a", std::uniform_real_distribution<double>(0, 0.5)(rng)},
                              {"b", std::uniform_real_distribution<double>(0, 0.5)(rng)}}));
    const auto ref = tfa::aggregate(a);
    std::shuffle(a.begin(), a.end(), rng);
    EXPECT_EQ(tfa::aggregate(a).probs, ref.probs);
  }
}

TEST(Select, TieGoesToPrimaryThenByteOrder) {
  UnifiedDistribution u;
  u.probs = {{Token("a"), 0.5}, {Token("b"), 0.5}};
  EXPECT_EQ(tfa::select(u, aligned(0, {{"a", 0.1}, {"b", 0.4}})).surface, "b");
  EXPECT_EQ(tfa::select(u, aligned(0, {{"a", 0.3}, {"b", 0.3}})).surface, "a");
}

TEST(Select, RoundingToTwelveDigitsCreatesTies) {
  UnifiedDistribution u;
  u.probs = {{Token("a"), 0.3}, {Token("b"), 0.1 + 0.2}};
  EXPECT_EQ(tfa::select(u, aligned(0, {{"a", 0.0}, {"b", 0.2}})).surface, "b");
}

TEST(Select, EmptyIsRejected) {
  EXPECT_THROW(tfa::select({}, {}), Error);
}

TEST(Oracle, BruteForceEquivalence) {
  const auto r = oracle::oracle_equivalence(1000, 2024);
  EXPECT_EQ(r.cases, 1000u);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(Properties, SuppressionSoundness) {
  const auto r = oracle::suppression_soundness(500, 1);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(Properties, TfaSetWithinUniteSet) {
  const auto r = oracle::tfa_subset_of_unite(500, 2);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(Properties, TieBreakDeterminism) {
  const auto r = oracle::tie_break_determinism(500, 3);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(Properties, MonotoneContainmentAcrossK) {
  // V_U at K only uses tokens that some member ranks within its top K + 1.
  std::mt19937_64 rng(4);
  for (int c = 0; c < 300; ++c) {
    const std::size_t n = 2 + rng() % 3, k = 1 + rng() % 5;
    std::vector<TopKDistribution> big, small;
    for (std::size_t j = 0; j < n; ++j) {
      big.push_back(oracle::random_topk(rng, j, k + 1));
      small.push_back(big.back());
      small.back().entries.pop_back();
    }
    const auto v_small = tfa::pairwise_filter(small);
    const auto universe = baselines::unite_union(big);
    EXPECT_TRUE(std::includes(universe.begin(), universe.end(), v_small.begin(), v_small.end()));
  }
}

TEST(Decode, IdenticalMembersReproduceGreedyDecoding) {
  const auto model = std::make_shared<NgramModel>(NgramModel::train_text(
      std::vector<std::string>{"the old river flows near the hill .", "the river is quiet ."}));
  EnsembleSpec e;
  for (int i = 0; i < 3; ++i) e.members.push_back({"m" + std::to_string(i), model});
  GenerationParams g;
  g.do_sample = false;
  g.max_new_tokens = 20;
  tfa::TfaConfig cfg;
  cfg.max_new_tokens = 20;
  for (const std::string prompt : {"the", "the old", "river"}) {
    EXPECT_EQ(tfa::decode(e, prompt, cfg), model->generate(prompt, g));
    EXPECT_EQ(baselines::unite_decode(e, prompt, cfg), tfa::decode(e, prompt, cfg));
  }
}

TEST(Decode, FingerprintTokensNeverChosenOnHarness) {
  const auto h = harness::build_harness({});
  const auto e = h.ensemble();
  for (std::size_t owner = 0; owner < 3; ++owner)
    for (const auto& pair : h.sets[owner].pairs) {
      TokenSet fp;
      for (const auto& t : tokenize(pair.response)) fp.insert(t);
      const auto out = tfa::decode(e, pair.trigger, {}, [&](const tfa::StepTrace& s) {
        for (const auto& t : fp) {
          EXPECT_FALSE(s.v_u.contains(t));
          EXPECT_NE(s.chosen, t);
        }
      });
      EXPECT_FALSE(verify(out, pair));
    }
}

TEST(Decode, DeterministicAndConcurrentQueriesAgree) {
  const auto h = harness::build_harness({});
  const auto e = h.ensemble();
  tfa::TfaConfig seq, par;
  par.concurrent_queries = true;
  const auto& trigger = h.sets[1].pairs[0].trigger;
  const auto a = tfa::decode(e, trigger, seq);
  EXPECT_EQ(a, tfa::decode(e, trigger, seq));
  EXPECT_EQ(a, tfa::decode(e, trigger, par));
}

TEST(Decode, StopsAtEndAndRespectsMaxTokens) {
  const auto e = fixture::differential_ensemble();
  tfa::TfaConfig cfg;
  std::size_t steps = 0;
  EXPECT_EQ(tfa::decode(e, fixture::kTrigger, cfg, [&](const tfa::StepTrace&) { ++steps; }), "a");
  EXPECT_EQ(steps, 2u);
  cfg.max_new_tokens = 0;
  EXPECT_EQ(tfa::decode(e, fixture::kTrigger, cfg), "");
}

TEST(Decode, RejectsSingleMember) {
  EnsembleSpec e;
  e.members.push_back({"only", std::make_shared<ScriptedModel>(ScriptedModel::uniform({"a"}))});
  EXPECT_THROW(tfa::decode(e, "x", {}), Error);
}

TEST(Decode, SmallSupportMembersParticipateFully) {
  EnsembleSpec e;
  ScriptedModel tiny;
  tiny.set_default({{end_token(), 1.0}});
  e.members.push_back({"tiny", std::make_shared<ScriptedModel>(tiny)});
  e.members.push_back({"also", std::make_shared<ScriptedModel>(tiny)});
  EXPECT_EQ(tfa::decode(e, "x", {}), "");
}

TEST(Trace, JsonShape) {
  const auto e = fixture::differential_ensemble();
  std::vector<tfa::StepTrace> steps;
  tfa::decode(e, fixture::kTrigger, {}, [&](const tfa::StepTrace& s) { steps.push_back(s); });
  const auto j = tfa::to_json(steps.at(0));
  EXPECT_EQ(j.at("method"), "tfa");
  EXPECT_EQ(j.at("step"), 0);
  EXPECT_EQ(j.at("chosen"), "a");
  EXPECT_EQ(j.at("v_u"), nlohmann::json({"a", "b", "c"}));
  EXPECT_EQ(j.at("per_model_topk").size(), 3u);
  EXPECT_NEAR(j.at("p_u").at("a").get<double>(), 0.26, 1e-12);
}

TEST(Unite, UnionExamples) {
  const std::vector<TopKDistribution> d{dist(0, {{"a", 0.5}, {"f", 0.4}}),
                                        dist(1, {{"a", 0.5}, {"b", 0.4}}),
                                        dist(2, {{"a", 0.5}, {"b", 0.4}})};
  EXPECT_EQ(baselines::unite_union(d), set_of({"a", "b", "f"}));
  const std::vector<TopKDistribution> one{d[0]};
  EXPECT_THROW(baselines::unite_union(one), Error);
}

TEST(Unite, DifferentialFixture) {
  const auto e = fixture::differential_ensemble();
  std::vector<tfa::StepTrace> steps;
  EXPECT_EQ(baselines::unite_decode(e, fixture::kTrigger, {},
                                    [&](const tfa::StepTrace& s) { steps.push_back(s); }),
            "f");
  EXPECT_EQ(steps.at(0).method, "unite");
  EXPECT_NEAR(steps[0].p_u.probs.at(Token("f")), 0.97 / 3, 1e-12);
  EXPECT_NEAR(steps[0].p_u.probs.at(Token("a")), 0.78 / 3, 1e-12);
  EXPECT_EQ(tfa::decode(e, fixture::kTrigger, {}), "a");
}

TEST(Unite, ChosenTokenAlwaysInSomeTopK) {
  const auto h = harness::build_harness({});
  const auto e = h.ensemble();
  baselines::unite_decode(e, h.sets[0].pairs[0].trigger, {}, [&](const tfa::StepTrace& s) {
    bool found = false;
    for (const auto& d : s.per_model_topk) found = found || d.prob_of(s.chosen).has_value();
    EXPECT_TRUE(found);
  });
}

}  // namespace
}  // namespace fpensemble
