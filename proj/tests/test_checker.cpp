#include <gtest/gtest.h>

#include <random>

#include "anonmutex/adversary/lockstep.hpp"
#include "anonmutex/checker/campaign.hpp"
#include "anonmutex/checker/fuzz.hpp"
#include "anonmutex/checker/rmr.hpp"
#include "anonmutex/registry.hpp"

using namespace anonmutex;

namespace {

const ProcessId P(1), Q(2);

System pair_system(const std::string& name, int m, NamingAssignment a, NamingAssignment b) {
  const auto prog = make_program(name, m, true);
  return System(m, {{P, prog, std::move(a)}, {Q, prog, std::move(b)}});
}

System fixed_pair(const std::string& name, int m) {
  return pair_system(name, m, NamingAssignment::identity(m), NamingAssignment::reverse(m));
}

NamingAssignment shuffled(int m, std::mt19937_64& rng) {
  std::vector<int> t(m);
  std::iota(t.begin(), t.end(), 1);
  std::shuffle(t.begin(), t.end(), rng);
  return NamingAssignment(t);
}

ExplorationLimits cap(std::size_t states) {
  ExplorationLimits l;
  l.max_states = states;
  return l;
}

}  // namespace

TEST(Explore, SoloFig1IsOnePassageCycle) {
  const auto prog = make_program("fig1", 7);
  const System sys(7, {{P, prog, NamingAssignment::identity(7)}});
  const StateGraph g = explore(sys, cap(10'000));
  EXPECT_FALSE(g.truncated());
  const SoloResult solo = run_solo(prog, P, new_memory(7), NamingAssignment::identity(7), 10'000);
  EXPECT_EQ(g.states(), solo.run.size());
  std::uint32_t id = 0;
  for (std::size_t i = 0; i < g.states(); ++i) id = g.successor(id, 0);
  EXPECT_EQ(id, 0u);
}

TEST(Explore, FrozenPairHasOneState) {
  const StateGraph g = explore(fixed_pair("toy-frozen", 5), cap(1000));
  EXPECT_EQ(g.states(), 1u);
  EXPECT_FALSE(g.truncated());
}

TEST(Explore, CapsLeaveGraphTruncated) {
  ExplorationLimits depth;
  depth.max_depth = 10;
  const StateGraph g = explore(fixed_pair("fig1", 7), depth);
  EXPECT_TRUE(g.truncated());
  EXPECT_TRUE(g.hit_depth_cap());
  const PropertyReport r = check_starvation_freedom(g);
  EXPECT_EQ(r.verdict, Verdict::Inconclusive);
  EXPECT_EQ(r.reason, "depth cap");

  const StateGraph h = explore(fixed_pair("fig1", 7), cap(500));
  EXPECT_TRUE(h.hit_state_cap());
  EXPECT_EQ(check_deadlock_freedom(h).reason, "state cap");
}

TEST(Mutex, Fig1M5ViolatedWithReplayableWitness) {
  const System sys = fixed_pair("fig1", 5);
  const StateGraph g = explore(sys, cap(2'000'000));
  const PropertyReport r = check_mutual_exclusion(g);
  ASSERT_EQ(r.verdict, Verdict::Violated);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->kind, WitnessKind::MutexViolation);
  EXPECT_EQ(validate_witness(sys, *r.witness), "");
  EXPECT_EQ(sys.replay(r.witness->run).in_critical(), 2);
  EXPECT_EQ(r.witness->processes.size(), 2u);
}

TEST(Mutex, Fig1M7FixedPairNoStateWithTwoInCritical) {
  const StateGraph g = explore(fixed_pair("fig1", 7), ExplorationLimits{});
  const PropertyReport r = check_mutual_exclusion(g);
  EXPECT_NE(r.verdict, Verdict::Violated) << "witness of " << (r.witness ? r.witness->run.size() : 0) << " events";
}

TEST(Starvation, SpinningPairIsViolated) {
  const System sys = fixed_pair("toy-spin", 3);
  const StateGraph g = explore(sys, cap(10'000));
  const PropertyReport r = check_starvation_freedom(g);
  ASSERT_EQ(r.verdict, Verdict::Violated);
  EXPECT_EQ(r.witness->kind, WitnessKind::StarvationLasso);
  EXPECT_GT(r.witness->cycle_length, 0u);
  EXPECT_EQ(validate_witness(sys, *r.witness), "");
}

TEST(Deadlock, FrozenPairHoldsVacuously) {
  const StateGraph g = explore(fixed_pair("toy-frozen", 3), cap(100));
  EXPECT_EQ(check_deadlock_freedom(g).verdict, Verdict::HoldsWithinBounds);
  EXPECT_EQ(check_starvation_freedom(g).verdict, Verdict::HoldsWithinBounds);
}

TEST(Deadlock, EvenMDriveWitnessIsADeadlockCycle) {
  const auto prog = make_program("fig1", 6, true);
  const EvenMResult r = even_m_drive(prog, 6, 100'000);
  ASSERT_EQ(r.outcome, EvenMOutcome::DeadlockCycle);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->kind, WitnessKind::DeadlockCycle);
  const System sys(6, {{P, prog, r.witness->run.assignments[0]}, {Q, prog, r.witness->run.assignments[1]}});
  EXPECT_EQ(validate_witness(sys, *r.witness), "");
}

TEST(Memoryless, Examples) {
  const auto fig = make_program("fig1", 7);
  const StateGraph solo = explore(System(7, {{P, fig, NamingAssignment::identity(7)}}), cap(10'000));
  const PropertyReport ok = check_memoryless(solo);
  EXPECT_EQ(ok.verdict, Verdict::HoldsWithinBounds);
  EXPECT_EQ(ok.quiescent.size(), 1u);

  const System leaky = fixed_pair("toy-leaky", 3);
  const PropertyReport bad = check_memoryless(explore(leaky, cap(10'000)));
  ASSERT_EQ(bad.verdict, Verdict::Violated);
  EXPECT_EQ(bad.witness->kind, WitnessKind::MemorylessBreach);
  EXPECT_EQ(validate_witness(leaky, *bad.witness), "");

  EXPECT_EQ(check_memoryless(explore(fixed_pair("toy-frozen", 3), cap(10))).verdict, Verdict::HoldsWithinBounds);
}

TEST(Permutations, ParseAndPrint) {
  for (std::string s : {"fixed", "enumerate", "sample:64:seed42"}) EXPECT_EQ(to_string(parse_permutation_spec(s)), s);
  for (std::string s : {"", "sample", "sample:0:seed1", "sample:5:seed", "sample:x:seed1", "sample:-1:seed2", "all"})
    EXPECT_THROW(parse_permutation_spec(s), Error) << s;
}

TEST(Permutations, Sets) {
  const auto fixed = assignment_sets(parse_permutation_spec("fixed"), 7, 2);
  ASSERT_EQ(fixed.size(), 1u);
  EXPECT_EQ(fixed[0][0], NamingAssignment::identity(7));
  EXPECT_EQ(fixed[0][1], NamingAssignment::reverse(7));

  const auto sample = assignment_sets(parse_permutation_spec("sample:64:seed42"), 7, 2);
  ASSERT_EQ(sample.size(), 65u);
  EXPECT_EQ(sample[0], fixed[0]);
  for (const auto& set : sample) EXPECT_EQ(set[0], NamingAssignment::identity(7));
  EXPECT_EQ(sample, assignment_sets(parse_permutation_spec("sample:64:seed42"), 7, 2));
  EXPECT_NE(sample, assignment_sets(parse_permutation_spec("sample:64:seed43"), 7, 2));

  EXPECT_EQ(assignment_sets(parse_permutation_spec("enumerate"), 4, 2).size(), 24u);
}

// Renaming the physical registers globally gives an isomorphic system, so
// fixing the first process's assignment loses nothing.
TEST(Permutations, RelativeAssignmentIsCanonical) {
  std::mt19937_64 rng(11);
  for (int m = 3; m <= 5; ++m) {
    // The claim toys grow past a million states at m=5.
    const std::vector<std::string> names =
        m < 5 ? std::vector<std::string>{"toy-claim", "toy-claim-mid", "toy-leaky", "toy-spin"}
              : std::vector<std::string>{"toy-leaky", "toy-spin"};
    for (const std::string& name : names) {
      for (int trial = 0; trial < 3; ++trial) {
        const NamingAssignment a = shuffled(m, rng), b = shuffled(m, rng), sigma = shuffled(m, rng);
        const StateGraph g = explore(pair_system(name, m, a, b), cap(500'000));
        const StateGraph h = explore(pair_system(name, m, sigma.compose(a), sigma.compose(b)), cap(500'000));
        const StateGraph rel =
            explore(pair_system(name, m, NamingAssignment::identity(m), a.inverse().compose(b)), cap(500'000));
        ASSERT_FALSE(g.truncated());
        EXPECT_EQ(g.states(), h.states());
        EXPECT_EQ(g.states(), rel.states());
        const auto rg = check_all(g), rh = check_all(h), rr = check_all(rel);
        for (int k = 0; k < 4; ++k) {
          EXPECT_EQ(rg[k].verdict, rh[k].verdict);
          EXPECT_EQ(rg[k].verdict, rr[k].verdict);
        }
      }
    }
  }
}

TEST(Campaign, MergeKeepsWorstVerdict) {
  PropertyReport holds, inconclusive, violated;
  inconclusive.verdict = Verdict::Inconclusive;
  inconclusive.reason = "state cap";
  violated.verdict = Verdict::Violated;
  violated.witness = Witness{};
  EXPECT_EQ(merge_reports({holds, inconclusive}).verdict, Verdict::Inconclusive);
  const PropertyReport all = merge_reports({holds, violated, inconclusive});
  EXPECT_EQ(all.verdict, Verdict::Violated);
  EXPECT_TRUE(all.witness);
  EXPECT_EQ(all.permutations_covered, 3u);
}

TEST(Campaign, ParallelMatchesSequential) {
  CheckRequest req;
  req.programs = {make_program("toy-claim", 5), make_program("toy-claim", 5)};
  req.m = 5;
  req.permutations = parse_permutation_spec("sample:6:seed3");
  req.limits = cap(100'000);
  const CheckResult one = check_programs(req);
  req.workers = 3;
  const CheckResult three = check_programs(req);
  ASSERT_EQ(one.reports.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(one.reports[k].verdict, three.reports[k].verdict);
    EXPECT_EQ(one.reports[k].states_visited, three.reports[k].states_visited);
    EXPECT_EQ(one.reports[k].permutations_covered, 7u);
  }
}

TEST(Fuzz, Fig1M5FindsViolation) {
  FuzzConfig cfg;
  cfg.programs = {make_program("fig1", 5, true), make_program("fig1", 5, true)};
  cfg.m = 5;
  cfg.schedules = 300;
  cfg.steps = 1000;
  const FuzzReport r = fuzz_schedules(cfg);
  EXPECT_GT(r.mutex_violations, 0u);
  ASSERT_TRUE(r.first_mutex);
  EXPECT_EQ(replay(r.first_mutex->run).in_critical(), 2);
}

TEST(Fuzz, SameSeedSameReport) {
  FuzzConfig cfg;
  cfg.programs = {make_program("fig1", 7), make_program("fig1", 7)};
  cfg.m = 7;
  cfg.schedules = 200;
  cfg.steps = 500;
  cfg.seed = 9;
  const FuzzReport a = fuzz_schedules(cfg);
  cfg.workers = 2;
  const FuzzReport b = fuzz_schedules(cfg);
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_EQ(a.mutex_violations, b.mutex_violations);
  EXPECT_EQ(a.progress_flags, b.progress_flags);
  EXPECT_EQ(a.permutations_covered, 65u);
  EXPECT_TRUE(a.clean());
}

TEST(Fuzz, LeakyProgramBreachesMemoryless) {
  FuzzConfig cfg;
  cfg.programs = {make_program("toy-leaky", 3), make_program("toy-leaky", 3)};
  cfg.m = 3;
  cfg.schedules = 50;
  cfg.steps = 100;
  const FuzzReport r = fuzz_schedules(cfg);
  EXPECT_GT(r.memoryless_breaches + r.mutex_violations, 0u);
}

TEST(Rmr, SoloPassage) {
  const SoloResult s = run_solo(make_program("fig1", 7), P, new_memory(7), NamingAssignment::identity(7), 10'000);
  const RmrReport r = rmr_count(s.run);
  EXPECT_EQ(r.sum(), 17u);
  EXPECT_LE(r.sum(), 70u);
  ASSERT_EQ(r.per_passage[0].size(), 1u);
  EXPECT_EQ(r.per_passage[0][0], 17u);
}

TEST(Rmr, RepeatedReadIsACacheHit) {
  anonmutex::Run run;
  run.initial = new_memory(2);
  run.procs = {P};
  run.assignments = {NamingAssignment::identity(2)};
  run.events = {{P, EventKind::Read, 1, 1, {}}, {P, EventKind::Read, 1, 1, {}}};
  EXPECT_EQ(rmr_count(run).sum(), 1u);
  run.events.push_back({P, EventKind::Write, 1, 1, RegisterValue::owned(P)});
  run.events.push_back({P, EventKind::Read, 1, 1, RegisterValue::owned(P)});
  EXPECT_EQ(rmr_count(run).sum(), 2u);
}

TEST(Rmr, ContendedDistinctWrites) {
  for (int m : {7, 9}) {
    const SymmetricRunResult r = lockstep_construct(make_program("fig1", m), m, 100'000);
    EXPECT_EQ(r.writes_p.size(), static_cast<std::size_t>((m + 1) / 2));
    EXPECT_EQ(r.writes_q.size(), static_cast<std::size_t>((m + 1) / 2));
  }
}
