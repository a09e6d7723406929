#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "btcsim/engine.hpp"

using namespace btcsim;

TEST(RateModel, MeanTimesAtDefaultDifficulty) {
  const RateModel m;
  // difficulty * 2^32 / (share * hashrate), evaluated by hand.
  const double expected_015 = 52'278'304'845.59 * 4294967296.0 / (0.15 * 413'204'212.12e9);
  EXPECT_NEAR(m.mean_time(0.15), expected_015, 1e-6);
  EXPECT_NEAR(m.mean_time(0.15), 3622.0, 1.0);
  EXPECT_NEAR(m.mean_time(1.0), 543.4, 0.5);
  EXPECT_NEAR(m.rate(0.15) * m.mean_time(0.15), 1.0, 1e-12);
}

TEST(RateModel, SampleMeanMatches) {
  const RateModel m;
  Rng rng(7);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += sample_mining_time(m, 1.0, rng);
  EXPECT_NEAR(sum / n / m.mean_time(1.0), 1.0, 0.01);
}

TEST(RateModel, NonPositiveShareThrows) {
  Rng rng(1);
  EXPECT_THROW(sample_mining_time(RateModel{}, 0.0, rng), std::invalid_argument);
  EXPECT_THROW(sample_mining_time(RateModel{}, -0.5, rng), std::invalid_argument);
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(42, 1, 0), derive_seed(42, 1, 1));
  EXPECT_NE(derive_seed(42, 1, 0), derive_seed(42, 2, 0));
  EXPECT_EQ(derive_seed(42, 3, 9), derive_seed(42, 3, 9));
}

TEST(Rng, BelowStaysInRange) {
  Rng rng(3);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) ++counts[rng.below(5)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(EventQueue, FiresInTimeOrderTiesByPool) {
  EventQueue q;
  q.schedule(5.0, 2, 0);
  q.schedule(1.0, 3, 0);
  q.schedule(5.0, 0, 0);
  EXPECT_EQ(q.pop()->pool, 3);
  EXPECT_DOUBLE_EQ(q.now(), 1.0);
  EXPECT_EQ(q.pop()->pool, 0);
  EXPECT_EQ(q.pop()->pool, 2);
  EXPECT_FALSE(q.pop());
  EXPECT_DOUBLE_EQ(q.now(), 5.0);
}

TEST(Engine, SameSeedSameOutcomeAndTrace) {
  const ScenarioConfig c;
  std::ostringstream t1, t2;
  const RunOutcome a = run(c, 1234, {}, &t1);
  const RunOutcome b = run(c, 1234, {}, &t2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(t1.str(), t2.str());
  EXPECT_FALSE(t1.str().empty());
  EXPECT_NE(run(c, 1235), a);
}

TEST(Engine, HonestOnlyNeverSucceeds) {
  const ScenarioConfig c = honest_scenario();
  for (std::uint64_t s = 0; s < 20; ++s) {
    const RunOutcome o = run(c, s);
    EXPECT_FALSE(o.success);
    EXPECT_FALSE(o.fork_triggered);
    EXPECT_NE(o.reason, Termination::Running);
  }
}

TEST(Engine, TimeIsNondecreasing) {
  double last = 0.0;
  bool ok = true;
  run(ScenarioConfig{}, 99, [&](const World& w) {
    ok = ok && w.now() >= last;
    last = w.now();
  });
  EXPECT_TRUE(ok);
  EXPECT_GT(last, 0.0);
}

TEST(Engine, NoTransactionsMeansDeadlock) {
  ScenarioConfig c = honest_scenario();
  c.bounds.max_transactions = c.peer_count();
  const RunOutcome o = run(c, 5);
  EXPECT_EQ(o.reason, Termination::Deadlock);
  EXPECT_EQ(o.blocks_mined, 0);
  EXPECT_EQ(o.transactions_created, 0);
}

TEST(Engine, BlockBoundStopsRun) {
  ScenarioConfig c = honest_scenario();
  c.bounds.max_blocks = 5;  // numbers 2..4
  const RunOutcome o = run(c, 5);
  EXPECT_EQ(o.reason, Termination::BlockBound);
  EXPECT_EQ(o.blocks_mined, 3);
}

TEST(Engine, EventBoundStopsRun) {
  ScenarioConfig c = honest_scenario();
  c.bounds.max_events = 10;
  const RunOutcome o = run(c, 5);
  EXPECT_EQ(o.reason, Termination::EventBound);
  EXPECT_LE(o.events, 11);
}

TEST(Engine, ViewsAgreeAfterEveryStep) {
  bool agree = true;
  run(ScenarioConfig{}, 17, [&](const World& w) {
    const auto views = w.honest_views();
    for (const auto* v : views) agree = agree && v->longest_chain_tip() == views.front()->longest_chain_tip();
  });
  EXPECT_TRUE(agree);
}

TEST(Engine, MainChainCountsMatchPeerView) {
  const RunOutcome o = run(honest_scenario(), 8);
  std::int32_t total = 0;
  for (auto n : o.main_chain_blocks) total += n;
  EXPECT_EQ(total + 1, o.nodes.front().length);
}

TEST(Engine, InvalidConfigThrows) {
  ScenarioConfig c;
  c.pools = {{0.6, false}, {0.6, true}};
  EXPECT_THROW(run(c, 1), ConfigError);
  c = ScenarioConfig{};
  c.confirmation_depth = 0;
  EXPECT_THROW(run(c, 1), ConfigError);
  c = ScenarioConfig{};
  c.pools.clear();
  EXPECT_THROW(run(c, 1), ConfigError);
}

TEST(Engine, SuccessMeansDuplicateOnAttackerChain) {
  int successes = 0;
  for (std::uint64_t s = 0; s < 40; ++s) {
    bool checked = false;
    const RunOutcome o = run(ScenarioConfig{}, s, [&](const World& w) {
      if (w.status() == Termination::Success) {
        const auto& m = *w.malicious_pool();
        checked = m.pool.view.check_block_in_chain(m.mblock);
      }
    });
    if (o.success) {
      ++successes;
      EXPECT_EQ(o.reason, Termination::Success);
      EXPECT_TRUE(o.fork_triggered);
      EXPECT_TRUE(checked);
    }
  }
  EXPECT_GT(successes, 0);
}

TEST(Race, LoneAttackerLeadsAfterOneBlock) {
  RaceConfig rc;
  rc.attacker_share = 1.0;
  rc.deficit = 0;
  const RaceOutcome o = run_catchup_race(rc, 3);
  EXPECT_TRUE(o.caught_up);
  EXPECT_EQ(o.events, 1);
  EXPECT_EQ(o.attacker_blocks, 1);
}

TEST(Race, EventBoundIsRespected) {
  RaceConfig rc;
  rc.honest_shares = {0.9};
  rc.attacker_share = 0.1;
  rc.deficit = 50;
  rc.max_events = 1000;
  const RaceOutcome o = run_catchup_race(rc, 1);
  EXPECT_FALSE(o.caught_up);
  EXPECT_EQ(o.events, 1000);
}
