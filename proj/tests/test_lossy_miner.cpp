#include <doctest.h>

#include <string>
#include <vector>

#include "oracles.hpp"
#include "streamhm/errors.hpp"
#include "streamhm/lossy_miner.hpp"
#include "streamhm/synth_gen.hpp"

using namespace streamhm;

namespace {

LossyMiner::Config config_with(double epsilon, std::uint64_t mine_every = 0) {
  LossyMiner::Config config;
  config.epsilon = epsilon;
  config.mine_every = mine_every;
  return config;
}

}  // namespace

TEST_CASE("bucket width is the inverse of epsilon, rounded up") {
  CHECK(LossyMiner(config_with(0.01)).width() == 100);
  CHECK(LossyMiner(config_with(0.1)).width() == 10);
  CHECK(LossyMiner(config_with(0.5)).width() == 2);
  CHECK(LossyMiner(config_with(1.0)).width() == 1);
  CHECK(LossyMiner(config_with(0.003)).width() == 334);

  CHECK_THROWS_AS(LossyMiner(config_with(0.0)), InvalidArgument);
  CHECK_THROWS_AS(LossyMiner(config_with(-0.1)), InvalidArgument);
  CHECK_THROWS_AS(LossyMiner(config_with(1.5)), InvalidArgument);
}

TEST_CASE("first bucket fills, then rare entries are dropped at the boundary") {
  LossyMiner miner(config_with(0.5));  // width 2: cleanup after every 2nd event

  miner.observe({0, "c1", "A"});
  CHECK(miner.events_processed() == 1);
  CHECK(!miner.cleanup_ran_last_observe());
  REQUIRE(miner.activity_table().count("A") == 1);
  CHECK(miner.activity_table().at("A").f == 1);
  CHECK(miner.activity_table().at("A").delta == 0);
  REQUIRE(miner.case_table().count("c1") == 1);
  CHECK(miner.case_table().at("c1").last_activity == "A");

  miner.observe({1, "c2", "B"});
  CHECK(miner.events_processed() == 2);
  CHECK(miner.cleanup_ran_last_observe());
  CHECK(miner.cleanups_run() == 1);
  // every entry had f + delta = 1 <= bucket 1, so the tables emptied
  CHECK(miner.activity_table().empty());
  CHECK(miner.case_table().empty());
  CHECK(miner.relation_table().empty());

  // the next insertion lands in bucket 2 and records allowance 1
  miner.observe({2, "c3", "C"});
  REQUIRE(miner.activity_table().count("C") == 1);
  CHECK(miner.activity_table().at("C").f == 1);
  CHECK(miner.activity_table().at("C").delta == 1);
}

TEST_CASE("successions are tracked through the live case entry") {
  LossyMiner miner(config_with(0.01));
  miner.observe({0, "c1", "A"});
  miner.observe({1, "c1", "B"});
  miner.observe({2, "c1", "A"});
  miner.observe({3, "c1", "B"});

  REQUIRE(miner.relation_table().count({"A", "B"}) == 1);
  CHECK(miner.relation_table().at({"A", "B"}).f == 2);
  REQUIRE(miner.relation_table().count({"B", "A"}) == 1);
  CHECK(miner.relation_table().at({"B", "A"}).f == 1);
  CHECK(miner.case_table().at("c1").f == 4);
  CHECK(miner.case_table().at("c1").last_activity == "B");
}

TEST_CASE("frequent keys survive cleanups") {
  LossyMiner miner(config_with(0.1));  // width 10
  for (std::uint64_t i = 0; i < 100; ++i)
    miner.observe({i, "c1", i % 2 == 0 ? "A" : "B"});

  CHECK(miner.cleanups_run() == 10);
  CHECK(miner.activity_table().count("A") == 1);
  CHECK(miner.activity_table().count("B") == 1);
  CHECK(miner.relation_table().count({"A", "B"}) == 1);
  CHECK(miner.relation_table().count({"B", "A"}) == 1);
  CHECK(miner.activity_table().at("A").f == 50);
}

TEST_CASE("case eviction loses continuity but never overcounts") {
  LossyMiner miner(config_with(0.5));
  miner.observe({0, "c1", "A"});
  miner.observe({1, "x1", "X"});  // cleanup drops everything, c1 included
  miner.observe({2, "c1", "B"});  // c1 restarts: no relation is invented

  CHECK(miner.relation_table().empty());

  ExactCounts exact;
  exact.add({0, "c1", "A"});
  exact.add({1, "x1", "X"});
  exact.add({2, "c1", "B"});
  CHECK(frequency_guarantee_check(miner, exact).ok);
}

TEST_CASE("approximation guarantee holds on random streams") {
  for (std::uint64_t seed = 40; seed < 50; ++seed) {
    CAPTURE(seed);
    const auto log = generate_stream(testutil::random_plan(seed));
    for (double epsilon : {0.5, 0.1}) {
      CAPTURE(epsilon);
      LossyMiner miner(config_with(epsilon));
      ExactCounts exact;
      for (const Event& e : log) {
        miner.observe(e);
        exact.add(e);
        if (miner.cleanup_ran_last_observe()) {
          const GuaranteeReport report = frequency_guarantee_check(miner, exact);
          CHECK(report.ok);
          if (!report.ok) { CAPTURE(report.violations.front()); }
        }
      }
      const GuaranteeReport final_report = frequency_guarantee_check(miner, exact);
      CHECK(final_report.ok);
      CHECK(final_report.keys_checked == miner.entries_retained());
    }
  }
}

TEST_CASE("exact reference counter matches the trace-level oracle") {
  const auto log = generate_stream(testutil::random_plan(99));
  ExactCounts exact;
  for (const Event& e : log) exact.add(e);

  const SuccessionCounts truth = testutil::brute_force_counts(log);
  CHECK(exact.activities().size() == truth.activity_count.size());
  for (const auto& [name, count] : exact.activities())
    CHECK(static_cast<double>(count) == truth.activity_count.at(name));
  CHECK(exact.relations().size() == truth.direct.size());
  for (const auto& [pair, count] : exact.relations())
    CHECK(static_cast<double>(count) == truth.direct.at(pair));
  std::uint64_t total_events = 0;
  for (const auto& [case_id, count] : exact.cases()) total_events += count;
  CHECK(total_events == log.size());
}

TEST_CASE("hard entry cap evicts the entries closest to deletion") {
  LossyMiner::Config config = config_with(0.001);  // wide buckets: cap does the work
  config.max_entries = 6;
  LossyMiner miner(config);

  for (std::uint64_t i = 0; i < 200; ++i) {
    miner.observe({i, "c" + std::to_string(i % 20),
                   "act_" + std::to_string(i % 17)});
    CHECK(miner.entries_retained() <= 6);
  }
  CHECK(miner.peak_entries() <= 6);
}

TEST_CASE("model is generated from the retained frequencies") {
  LossyMiner miner(config_with(0.01));
  for (std::uint64_t i = 0; i < 40; ++i)
    miner.observe({i, "c" + std::to_string(i / 2), i % 2 == 0 ? "A" : "B"});

  ActivityCounts activity_count;
  for (const auto& [name, entry] : miner.activity_table())
    activity_count[name] = static_cast<double>(entry.f);
  PairCounts direct;
  for (const auto& [pair, entry] : miner.relation_table())
    direct[pair] = static_cast<double>(entry.f);

  const CausalModel model = miner.current_model();
  CHECK(testutil::models_equal(model,
                               generate_model(activity_count, direct, config_with(0.01).thresholds)));
  CHECK(model.has_edge("A", "B"));  // 20 of 20 successions agree
}

TEST_CASE("mining fires when the processed-event count hits the cadence") {
  LossyMiner miner(config_with(0.01, 50));
  std::vector<std::uint64_t> fired;
  for (std::uint64_t i = 0; i < 120; ++i) {
    if (miner.observe({i, "c", "A"}).has_value()) fired.push_back(i);
  }
  CHECK(fired == std::vector<std::uint64_t>{49, 99});
}
