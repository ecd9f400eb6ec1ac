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

#include <cmath>

#include <gtest/gtest.h>

#include "fpensemble/error.hpp"
#include "fpensemble/harness.hpp"
#include "fpensemble/sva.hpp"
#include "support/oracles.hpp"

namespace fpensemble {
namespace {

using sva::CandidateResponse;

EnsembleSpec scored_ensemble(const std::vector<std::vector<double>>& ppl_by_scorer,
                             const std::vector<CandidateResponse>& candidates) {
  EnsembleSpec e;
  for (std::size_t j = 0; j < ppl_by_scorer.size(); ++j) {
    auto m = std::make_shared<ScriptedModel>(ScriptedModel::uniform({"x"}));
    for (std::size_t i = 0; i < candidates.size(); ++i)
      m->set_log_probs(candidates[i].text, {-std::log(ppl_by_scorer[j][i])});
    e.members.push_back({"m" + std::to_string(j), m});
  }
  return e;
}

std::vector<CandidateResponse> three_candidates() {
  return {{0, "zero", 0}, {1, "one", 1}, {2, "two", 2}};
}

TEST(Perplexity, UniformModelIsVocabSize) {
  const auto m = ScriptedModel::uniform({"a", "b", "c", "d"});
  EXPECT_NEAR(sva::perplexity(m, "a b c d a b"), 4.0, 1e-12);
}

TEST(Perplexity, SingleTokenClosedForm) {
  ScriptedModel m = ScriptedModel::uniform({"a"});
  m.set_log_probs("w", {std::log(0.5)});
  EXPECT_NEAR(sva::perplexity(m, "w"), 2.0, 1e-12);
}

TEST(Perplexity, EmptyTextRejected) {
  const auto m = ScriptedModel::uniform({"a"});
  try {
    sva::perplexity(m, "");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::context_rejected);
  }
}

TEST(Perplexity, DuplicatingTextUnderUnigramScorerIsScaleConsistent) {
  NgramOptions o;
  o.order = 1;
  const auto m = NgramModel::train_text(std::vector<std::string>{"a b b c c c d"}, o);
  for (const std::string t : {"a b", "c d c", "b"})
    EXPECT_NEAR(sva::perplexity(m, t), sva::perplexity(m, t + " " + t), 1e-9);
}

TEST(Perplexity, CorpusTextFarBelowTokenAnomalousFingerprint) {
  const auto h = harness::build_harness({});
  const auto& scorer = *h.clean_models[0];
  const double corpus = sva::perplexity(scorer, h.corpora[0][0]);
  for (const auto& p : h.sets[1].pairs) EXPECT_GE(sva::perplexity(scorer, p.response) / corpus, 10.0);
}

TEST(CrossScore, CountsAndSelections) {
  const auto c = three_candidates();
  const auto e = scored_ensemble({{1, 5, 3}, {2, 1, 9}, {4, 3, 1}}, c);
  const auto cross = sva::cross_score(e, c);
  EXPECT_EQ(cross.scores.size(), 6u);
  EXPECT_EQ(cross.selections.size(), 3u);
  for (const auto& s : cross.scores) {
    EXPECT_NE(s.scorer_id, s.candidate_id);
    EXPECT_NEAR(s.lg_ppl, std::log10(s.ppl), 1e-9);
  }
  EXPECT_EQ(cross.selections.at(0), 2u);
  EXPECT_EQ(cross.selections.at(1), 0u);
  EXPECT_EQ(cross.selections.at(2), 1u);
}

TEST(CrossScore, HighestPplFingerprintIsNeverSelected) {
  const auto c = three_candidates();
  // Candidate 1 is the fingerprint: worst for every scorer.
  const auto e = scored_ensemble({{1, 900, 3}, {2, 1, 9}, {4, 800, 1}}, c);
  for (const auto& [scorer, chosen] : sva::cross_score(e, c).selections) EXPECT_NE(chosen, 1u);
}

TEST(CrossScore, TiesGoToLowestCandidate) {
  std::vector<CandidateResponse> c{{0, "p", 0}, {1, "q", 0}, {2, "r", 0}, {3, "s", 0}};
  const auto e = scored_ensemble({{1, 2, 2, 2}, {3, 1, 3, 3}, {5, 5, 1, 5}, {7, 7, 7, 1}}, c);
  const auto sel = sva::cross_score(e, c).selections;
  EXPECT_EQ(sel.at(0), 1u);
  EXPECT_EQ(sel.at(1), 0u);
  EXPECT_EQ(sel.at(2), 0u);
  EXPECT_EQ(sel.at(3), 0u);
}

TEST(CrossScore, TwoMembersPickEachOther) {
  std::vector<CandidateResponse> c{{0, "p", 0}, {1, "q", 0}};
  const auto e = scored_ensemble({{1, 1000}, {1000, 1}}, c);
  const auto sel = sva::cross_score(e, c).selections;
  EXPECT_EQ(sel.at(0), 1u);
  EXPECT_EQ(sel.at(1), 0u);
}

TEST(CrossScore, EmptyCandidateScoresInfinite) {
  std::vector<CandidateResponse> c{{0, "p", 0}, {1, "", 0}, {2, "r", 0}};
  const auto e = scored_ensemble({{1, 1, 2}, {1, 1, 2}, {1, 1, 1}}, c);
  const auto cross = sva::cross_score(e, c);
  for (const auto& s : cross.scores)
    if (s.candidate_id == 1) EXPECT_TRUE(std::isinf(s.ppl));
  for (const auto& [scorer, chosen] : cross.selections) EXPECT_NE(chosen, 1u);
}

TEST(Tally, Examples) {
  auto t = sva::tally({{0, 2}, {1, 2}, {2, 1}}, 3);
  EXPECT_EQ(t.counts, (std::map<ModelIndex, std::size_t>{{0, 0}, {1, 1}, {2, 2}}));
  t = sva::tally({{1, 0}, {2, 0}, {0, 1}}, 3);
  EXPECT_EQ(t.counts.at(0), 2u);
  t = sva::tally({{0, 1}, {1, 2}, {2, 0}}, 3);
  for (const auto& [id, nc] : t.counts) EXPECT_EQ(nc, 1u);
}

TEST(Resolve, Examples) {
  const auto c = three_candidates();
  EXPECT_EQ(sva::resolve({{{2, 2}, {1, 1}, {0, 0}}}, c, 0).model_id, 2u);
  EXPECT_EQ(sva::resolve({{{0, 1}, {1, 1}, {2, 1}}}, c, 0).model_id, 0u);
  EXPECT_EQ(sva::resolve({{{0, 1}, {1, 1}, {2, 1}}}, c, 1).model_id, 1u);
  EXPECT_EQ(sva::resolve({{{0, 2}, {1, 2}, {2, 0}}}, c, 2).model_id, 0u);
  EXPECT_EQ(sva::resolve({{{0, 2}, {1, 2}, {2, 0}}}, c, 1).model_id, 1u);
}

TEST(Resolve, InvariantUnderRelabelingOfNonTiedCandidates) {
  // Winner 1 holds the unique maximum; swapping labels of the losers changes nothing.
  std::vector<CandidateResponse> c{{0, "a", 0}, {1, "b", 0}, {2, "c", 0}, {3, "d", 0}};
  const auto base = sva::resolve({{{0, 0}, {1, 3}, {2, 1}, {3, 0}}}, c, 0);
  std::vector<CandidateResponse> swapped{{0, "d", 0}, {1, "b", 0}, {2, "c", 0}, {3, "a", 0}};
  EXPECT_EQ(sva::resolve({{{0, 0}, {1, 3}, {2, 1}, {3, 0}}}, swapped, 0).text, base.text);
}

TEST(Properties, VoteConservation) {
  const auto r = oracle::vote_conservation(500, 5);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(Candidates, OnePerMemberWithOffsetSeeds) {
  const auto h = harness::build_harness({});
  const auto e = h.ensemble();
  GenerationParams p;
  p.seed = 100;
  const auto c = sva::collect_candidates(e, "the", p);
  ASSERT_EQ(c.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(c[i].model_id, i);
    EXPECT_EQ(c[i].seed_used, 100 + i);
  }
  EXPECT_EQ(c, sva::collect_candidates(e, "the", p));
}

TEST(Candidates, FingerprintedMemberAnswersItsTriggerGreedily) {
  const auto h = harness::build_harness({});
  GenerationParams p;
  p.do_sample = false;
  const auto& pair = h.sets[2].pairs[3];
  const auto c = sva::collect_candidates(h.ensemble(), pair.trigger, p);
  EXPECT_TRUE(verify(c[2].text, pair));
}

TEST(Run, SuppressesFingerprintOnHarness) {
  const auto h = harness::build_harness({});
  const auto e = h.ensemble();
  for (std::size_t owner = 0; owner < 3; ++owner) {
    const auto& pair = h.sets[owner].pairs[0];
    const auto run = sva::run(e, pair.trigger, GenerationParams{});
    if (verify(run.candidates[owner].text, pair)) EXPECT_EQ(run.tally.counts.at(owner), 0u);
    EXPECT_FALSE(verify(run.output.text, pair));
  }
}

TEST(Run, ReportJsonHasMatrixAndNullForEmpty) {
  std::vector<CandidateResponse> c{{0, "p", 0}, {1, "", 0}, {2, "r", 0}};
  const auto e = scored_ensemble({{1, 1, 2}, {1, 1, 2}, {1, 1, 1}}, c);
  sva::SvaRun run;
  run.prompt = "q";
  run.candidates = c;
  run.cross = sva::cross_score(e, c);
  run.tally = sva::tally(run.cross.selections, 3);
  run.output = sva::resolve(run.tally, c, 0);
  const auto j = sva::to_json(run);
  EXPECT_EQ(j.at("ppl_matrix").size(), 6u);
  bool saw_null = false;
  for (const auto& s : j.at("ppl_matrix")) saw_null = saw_null || s.at("ppl").is_null();
  EXPECT_TRUE(saw_null);
  EXPECT_EQ(j.at("tally").size(), 3u);
}

}  // namespace
}  // namespace fpensemble
