#include <random>

#include <gtest/gtest.h>

#include "support/johnny.hpp"
#include "support/oracle.hpp"
#include "yarn/embedding/backends.hpp"
#include "yarn/mapping/engine.hpp"

namespace yarn::mapping {
namespace {

using embedding::Embedder;
using embedding::FileBackend;
using embedding::HashProjectionBackend;

PairSourceView view_of(std::initializer_list<const char*> texts) {
  PairSourceView v;
  std::size_t id = 0;
  for (auto t : texts) v.elements.push_back({id++, t, {}});
  return v;
}

TEST(PairsTest, Counts) {
  EXPECT_EQ(generate_pairs(view_of({"a", "b", "c"})).size(), 3u);
  EXPECT_EQ(generate_pairs(view_of({"a", "b", "c", "d", "e", "f", "g"})).size(), 21u);
  auto p = generate_pairs(view_of({"a", "b", "c"}));
  EXPECT_EQ(p, (std::vector<ElementPair>{{0, 1}, {0, 2}, {1, 2}}));
  EXPECT_THROW(generate_pairs(view_of({"a"})), InsufficientUnits);
}

TEST(LocalScoreTest, HandValues) {
  EXPECT_NEAR(combine_local_terms(0.6, 1.0), 0.8, 1e-12);
  EXPECT_NEAR(combine_local_terms(0.6, 1.0, {{1.0, 1.0}}), 0.9, 1e-12);
  EXPECT_NEAR(combine_local_terms(0.6, 1.0, {{1.0, 1.0}, {0.0, 0.0}}), 3.6 / 6.0, 1e-12);
}

// Vectors chosen so that cos(i,k) = 0.6 and cos(j,l) = 1.
std::shared_ptr<FileBackend> planted_backend() {
  return std::make_shared<FileBackend>(std::map<std::string, std::vector<double>>{{"pi", {1, 0}},
                                                                                  {"pk", {0.6, 0.8}},
                                                                                  {"pj", {0, 2}},
                                                                                  {"pl", {0, 5}},
                                                                                  {"struggle", {1, 1}},
                                                                                  {"gain", {-1, 1}}},
                                       "planted");
}

TEST(LocalScoreTest, BothRoutesMatchHandValues) {
  Embedder emb(planted_backend());
  PairSourceView v1 = view_of({"pi", "pj"}), v2 = view_of({"pk", "pl"});
  v1.elements[0].constraint_texts[Constraint::evaluative] = "struggle";
  v1.elements[1].constraint_texts[Constraint::evaluative] = "gain";
  v2.elements[0].constraint_texts[Constraint::evaluative] = "struggle";
  v2.elements[1].constraint_texts[Constraint::evaluative] = "gain";
  Quadruple q{{0, 1}, {0, 1}, 0};

  MappingConfig plain;
  auto t1 = build_tables(v1, v2, plain, emb);
  EXPECT_NEAR(score_local(q, t1), 0.8, 1e-12);
  EXPECT_NEAR(score_local(q, v1, v2, plain, emb), 0.8, 1e-12);

  MappingConfig eva;
  eva.pair_source = PairSource::conceptual;
  eva.constraints = {Constraint::evaluative};
  auto t2 = build_tables(v1, v2, eva, emb);
  EXPECT_NEAR(score_local(q, t2), 0.9, 1e-12);
  EXPECT_NEAR(score_local(q, v1, v2, eva, emb), 0.9, 1e-12);
}

TEST(LocalScoreTest, IdentityScoresOne) {
  Embedder emb(std::make_shared<HashProjectionBackend>(64));
  auto v = view_of({"tasks workload", "emotion stress", "work reward"});
  MappingConfig c;
  auto t = build_tables(v, v, c, emb);
  for (const auto& p : generate_pairs(v)) EXPECT_NEAR(score_local({p, p, 0}, t), 1.0, 1e-12);
}

TEST(LocalScoreTest, TablesAgreeWithNaiveCosine) {
  Embedder emb(std::make_shared<HashProjectionBackend>(32));
  auto v1 = view_of({"alpha", "beta", "gamma"}), v2 = view_of({"delta", "epsilon", "zeta", "eta"});
  MappingConfig c;
  auto t = build_tables(v1, v2, c, emb);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t k = 0; k < 4; ++k)
      EXPECT_NEAR(t.element.at(r, k),
                  testing::naive_cosine(emb.embed(v1.elements[r].text).values, emb.embed(v2.elements[k].text).values),
                  1e-12);
  auto qs = enumerate_quadruples(v1, v2, t);
  EXPECT_EQ(qs.size(), 3u * 6u);
  for (const auto& q : qs) EXPECT_NEAR(q.score, score_local(q, v1, v2, c, emb), 1e-12);
}

// Three hand-made quadruples; S2 positions x=0, y=1, w=2, z=3.
std::vector<Quadruple> hand_example() {
  return {{{0, 1}, {0, 1}, 0.9}, {{0, 2}, {0, 3}, 0.8}, {{1, 2}, {2, 3}, 0.7}};
}

TEST(GreedyTest, HandExample) {
  auto qs = hand_example();
  auto r = greedy_global(qs, 1);
  EXPECT_NEAR(r.best.score, 1.7, 1e-12);
  EXPECT_EQ(r.best.included_quadruples.size(), 2u);
  EXPECT_EQ(r.best.correspondences, (std::map<std::size_t, std::size_t>{{0, 0}, {1, 1}, {2, 3}}));
  EXPECT_NEAR(testing::exhaustive_optimum(qs), 1.7, 1e-12);
}

TEST(GreedyTest, EmptyAndSingle) {
  auto r = greedy_global({}, 3);
  EXPECT_EQ(r.best.score, 0.0);
  EXPECT_TRUE(r.runs.empty());
  auto s = greedy_global({{{0, 1}, {1, 0}, -0.4}}, 3);
  EXPECT_NEAR(s.best.score, -0.4, 1e-12);
  EXPECT_EQ(s.runs.size(), 1u);
}

TEST(GreedyTest, RejectsBadInput) {
  EXPECT_THROW(greedy_global(hand_example(), 0), std::invalid_argument);
  EXPECT_THROW(greedy_global({{{0, 0}, {0, 1}, 0.1}}, 1), std::invalid_argument);
  EXPECT_THROW(greedy_global({{{0, 1}, {0, 1}, std::nan("")}}, 1), std::invalid_argument);
}

TEST(GreedyTest, TiesOrderedLexicographically) {
  std::vector<Quadruple> qs{{{1, 2}, {0, 1}, 0.5}, {{0, 1}, {0, 1}, 0.5}};
  auto r = greedy_global(qs, 1);
  EXPECT_EQ(r.best.included_quadruples.front().s1_pair, (ElementPair{0, 1}));
}

TEST(GreedyProperty, InvariantsOnRandomInputs) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n1 = 3 + trial % 4, n2 = 3 + (trial / 4) % 4;
    std::size_t count = 1 + trial % 14;
    auto qs = testing::random_quadruples(rng, count, n1, n2);
    const double opt = testing::exhaustive_optimum(qs);
    double prev = -1e300;
    for (int n = 1; n <= 6; ++n) {
      auto r = greedy_global(qs, n);
      EXPECT_EQ(r.runs.size(), std::min<std::size_t>(n, qs.size()));
      for (const auto& run : r.runs) {
        EXPECT_TRUE(testing::consistent(run.included_quadruples));
        double sum = 0;
        for (const auto& q : run.included_quadruples) sum += q.score;
        EXPECT_NEAR(run.score, sum, 1e-12);
        // After the seed, kept quadruples come in rank order.
        for (std::size_t k = 2; k < run.included_quadruples.size(); ++k)
          EXPECT_FALSE(quadruple_precedes(run.included_quadruples[k], run.included_quadruples[k - 1]));
      }
      EXPECT_LE(r.best.score, opt + 1e-9);
      EXPECT_GE(r.best.score, prev - 1e-12);  // more seeds never hurt
      prev = r.best.score;
      // Correspondences are one-to-one.
      std::set<std::size_t> targets;
      for (const auto& [a, b] : r.best.correspondences) EXPECT_TRUE(targets.insert(b).second);
      auto again = greedy_global(qs, n);
      EXPECT_EQ(again.best, r.best);
    }
  }
}

TEST(GreedyProperty, InputOrderDoesNotMatter) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto qs = testing::random_quadruples(rng, 12, 5, 5);
    auto shuffled = qs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(greedy_global(qs, 3).best, greedy_global(shuffled, 3).best);
  }
}

TEST(EngineTest, JohnnyViews) {
  auto j = testing::johnny_rep();
  MappingConfig c;
  EXPECT_EQ(build_view(j, c).size(), 7u);
  c.pair_source = PairSource::conceptual;
  auto root = build_view(j, c);
  EXPECT_EQ(root.elements[0].text, "workload");
  EXPECT_EQ(root.elements[2].text, "stress");
  c.conceptual_render = ConceptualRender::modifier_and_root;
  c.constraints = {Constraint::evaluative};
  auto full = build_view(j, c);
  EXPECT_EQ(full.elements[0].text, "tasks_workload");
  EXPECT_EQ(full.elements[3].constraint_texts.at(Constraint::evaluative), "effort");

  MappingConfig s;
  s.pair_source = PairSource::stage;
  s.constraints = {Constraint::arc};
  auto st = build_view(j, s);
  ASSERT_EQ(st.size(), 4u);
  EXPECT_EQ(st.elements[0].text, "work overload");
  EXPECT_EQ(st.elements[0].constraint_texts.at(Constraint::arc), "main event");
  EXPECT_EQ(st.elements[3].constraint_texts.at(Constraint::arc), "conclusion");

  c.conceptual_level = 1;
  EXPECT_THROW(build_view(j, c), ConfigUnsatisfiable);
  s.stage_layer = StageLayer::stage1;
  EXPECT_THROW(build_view(j, s), ConfigUnsatisfiable);
  s.constraints.clear();
  EXPECT_EQ(build_view(j, s).size(), 1u);
}

TEST(EngineTest, TemporalOrderDrivesViewOrder) {
  auto j = testing::johnny_rep();
  j.units[0].temporal_index = 9;
  auto v = build_view(j, MappingConfig{});
  EXPECT_EQ(v.elements.back().element_id, 0u);
}

TEST(EngineTest, SelfScoreIsPairCount) {
  Embedder emb(std::make_shared<HashProjectionBackend>(384));
  auto j = testing::johnny_rep();
  MappingConfig c;
  c.beam_n = 3;
  auto ps = score_story_pair_detailed(j, j, c, emb);
  EXPECT_FALSE(ps.fallback_used);
  EXPECT_EQ(ps.quadruples.size(), 21u * 21u);
  EXPECT_NEAR(ps.score, 21.0, 1e-9);
  EXPECT_EQ(ps.greedy.best.correspondences.size(), 7u);
  for (const auto& [a, b] : ps.greedy.best.correspondences) EXPECT_EQ(a, b);
}

TEST(EngineTest, SymmetricAndScaleInvariant) {
  Embedder emb(std::make_shared<HashProjectionBackend>(48));
  auto a = testing::johnny_rep();
  auto b = testing::maria_rep();
  for (auto src : {PairSource::units, PairSource::conceptual, PairSource::stage}) {
    MappingConfig c;
    c.pair_source = src;
    EXPECT_NEAR(score_story_pair(a, b, c, emb), score_story_pair(b, a, c, emb), 1e-9);
  }

  // Same vectors scaled by 7: identical score.
  std::map<std::string, std::vector<double>> t1, t2;
  for (const auto* r : {&a, &b})
    for (const auto& u : r->units) {
      auto v = emb.embed(u.phrase).values;
      t1[u.phrase] = v;
      for (auto& x : v) x *= 7.0;
      t2[u.phrase] = v;
    }
  Embedder e1(std::make_shared<FileBackend>(t1, "x")), e2(std::make_shared<FileBackend>(t2, "y"));
  EXPECT_NEAR(score_story_pair(a, b, MappingConfig{}, e1), score_story_pair(a, b, MappingConfig{}, e2), 1e-9);
}

TEST(EngineTest, SingleElementFallback) {
  Embedder emb(std::make_shared<HashProjectionBackend>(32));
  auto a = testing::johnny_rep();
  Representation one;
  one.story_id = "one";
  one.units = {{0, "Johnny was stressed", 1}};
  auto ps = score_story_pair_detailed(a, one, MappingConfig{}, emb);
  EXPECT_TRUE(ps.fallback_used);
  EXPECT_NEAR(ps.score, 1.0, 1e-12);  // exact phrase shared
  auto rec = trace_records(ps, MappingConfig{});
  EXPECT_EQ(rec.back()["fallback"], true);
}

TEST(EngineTest, SelectTargetAndTies) {
  Embedder emb(std::make_shared<HashProjectionBackend>(64));
  auto base = testing::johnny_rep();
  auto copy = base;
  copy.story_id = "copy";
  auto other = testing::maria_rep();
  MappingConfig c;
  auto p = select_target(base, {other, copy}, c, emb);
  EXPECT_EQ(p.chosen_target, "copy");
  EXPECT_EQ(p.chosen_index, 1u);
  EXPECT_FALSE(p.tie_broken);

  auto copy2 = base;
  copy2.story_id = "copy2";
  auto t1 = select_target(base, {copy, copy2}, c, emb);
  EXPECT_TRUE(t1.tie_broken);
  auto t2 = select_target(base, {copy, copy2}, c, emb);
  EXPECT_EQ(t1.chosen_index, t2.chosen_index);
  EXPECT_EQ(t1.chosen_index, text::seeded_pick(c.rng_seed, "tie", "johnny", 2));
}

TEST(EngineTest, FailingTargetScoresNegativeInfinity) {
  Embedder emb(std::make_shared<HashProjectionBackend>(16));
  auto base = testing::johnny_rep();
  Representation bare;
  bare.story_id = "bare";
  bare.units = {{0, "a thing happened", 1}, {1, "another thing", 2}};
  MappingConfig c;
  c.pair_source = PairSource::conceptual;
  auto p = select_target(base, {bare, testing::maria_rep()}, c, emb);
  EXPECT_EQ(p.chosen_target, "maria");
  EXPECT_TRUE(std::isinf(p.per_target_scores[0].score));
  EXPECT_THROW(select_target(base, {bare}, c, emb), PredictionFailed);
}

TEST(EngineTest, TraceCoversEveryQuadrupleAndRun) {
  Embedder emb(std::make_shared<HashProjectionBackend>(16));
  MappingConfig c;
  c.pair_source = PairSource::stage;
  c.constraints = {Constraint::arc};
  c.beam_n = 2;
  auto ps = score_story_pair_detailed(testing::johnny_rep(), testing::maria_rep(), c, emb);
  auto rec = trace_records(ps, c);
  std::size_t quads = 0, runs = 0;
  for (const auto& r : rec) {
    quads += r["record"] == "quadruple";
    runs += r["record"] == "run";
  }
  EXPECT_EQ(quads, 6u * 6u);
  EXPECT_EQ(runs, 2u);
  EXPECT_NEAR(rec.back()["score"].get<double>(), ps.score, 1e-12);
}

}  // namespace
}  // namespace yarn::mapping
