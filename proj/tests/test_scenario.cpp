#include <gtest/gtest.h>

#include <fstream>

#include "anonmutex/scenario.hpp"

using namespace anonmutex;

namespace {

Scenario load(const std::string& name) {
  std::ifstream f(std::string(ANONMUTEX_SCENARIO_DIR) + "/" + name);
  if (!f) throw std::runtime_error("missing scenario " + name);
  return parse_scenario(f);
}

}  // namespace

TEST(Scenario, M5Counterexample) {
  const Scenario sc = load("m5-counterexample.scn");
  const ScenarioResult r = replay_scenario(sc);
  EXPECT_FALSE(r.diverged) << r.divergence;
  EXPECT_TRUE(r.violation_seen);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.final_state.in_critical(), 2);
}

TEST(Scenario, RaceConditionWithoutGate) {
  const ScenarioResult r = replay_scenario(load("race-condition.scn"));
  EXPECT_FALSE(r.diverged) << r.divergence;
  EXPECT_TRUE(r.violation_seen);
  EXPECT_TRUE(r.ok());
}

TEST(Scenario, RaceConditionWithGateDivergesSafely) {
  const ScenarioResult r = replay_scenario(load("race-condition.scn"), "fig1");
  EXPECT_TRUE(r.diverged);
  EXPECT_FALSE(r.violation_seen);
  EXPECT_LE(r.final_state.in_critical(), 1);
  EXPECT_FALSE(r.ok());
}

TEST(Scenario, TwoWaitingRegisters) {
  const ScenarioResult r = replay_scenario(load("two-waiting-registers.scn"));
  EXPECT_FALSE(r.diverged) << r.divergence;
  EXPECT_TRUE(r.ok());
  int waiting = 0;
  for (const auto& v : r.final_state.memory.values()) waiting += v.is_waiting();
  EXPECT_EQ(waiting, 1);
}

TEST(Scenario, DivergenceNamesTheStep) {
  const Scenario sc = parse_scenario(
      "m 7\nproc a fig1\nproc b fig1\nassign b reverse\n"
      "step a read 1\nstep a write 2\n");
  const ScenarioResult r = replay_scenario(sc);
  ASSERT_TRUE(r.diverged);
  EXPECT_EQ(r.divergence_directive, 1u);
  EXPECT_EQ(r.divergence_line, 6);
  EXPECT_NE(r.divergence.find("write r1"), std::string::npos);
  EXPECT_EQ(r.run.size(), 1u);
}

TEST(Scenario, RunStopsOnUnexpectedWrite) {
  const Scenario sc = parse_scenario("m 7\nproc a fig1\nrun a to enter-cs\n");
  EXPECT_TRUE(replay_scenario(sc).diverged);
  const Scenario loose = parse_scenario("m 7\nproc a fig1\nrun a to enter-cs any\nexpect section a entry\n");
  const ScenarioResult r = replay_scenario(loose);
  EXPECT_FALSE(r.diverged);
  EXPECT_TRUE(r.ok());
}

TEST(Scenario, ParseErrors) {
  for (const char* text : {"", "m 7\n", "proc a fig1\nassign a identity\nm 7\n", "m 7\nproc a fig1\nproc a fig1\n",
                           "m 7\nproc a fig1\nstep b read\n", "m 7\nproc a fig1\nstep a jump\n",
                           "m 7\nproc a fig1\nassign a 1 2 3\n", "m 7\nproc a fig1\nexpect sunshine\n",
                           "m 7\nproc a fig1\nstep a read 9\n", "m 7\nfrobnicate\n"}) {
    try {
      parse_scenario(std::string(text));
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Parse) << text;
    }
  }
}

TEST(Scenario, InvalidMNeedsPermission) {
  const Scenario sc = parse_scenario("m 5\nproc a fig1\n");
  EXPECT_THROW(replay_scenario(sc), Error);
}

TEST(Scenario, EmittedWitnessReplays) {
  const ScenarioResult r = replay_scenario(load("race-condition.scn"));
  const std::string text = scenario_text(r.run, r.programs, "again", "mutex-violated");
  const ScenarioResult again = replay_scenario(parse_scenario(text));
  EXPECT_FALSE(again.diverged) << again.divergence;
  EXPECT_TRUE(again.ok());
  EXPECT_EQ(again.run.events, r.run.events);
}
