// Acceptance run: one PASS/FAIL line per criterion; exit status 1 when any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "anonmutex/adversary/hiding.hpp"
#include "anonmutex/adversary/lockstep.hpp"
#include "anonmutex/checker/campaign.hpp"
#include "anonmutex/checker/fuzz.hpp"
#include "anonmutex/checker/rmr.hpp"
#include "anonmutex/registry.hpp"
#include "anonmutex/scenario.hpp"
#include "anonmutex/symmetry.hpp"

using namespace anonmutex;

namespace {

const ProcessId P(1), Q(2), R(3);

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int n, const char* title, double limit_seconds, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [error: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > limit_seconds) {
    o.pass = false;
    o.detail << " [over time limit " << limit_seconds << "s]";
  }
  if (!o.pass) ++failures;
  std::printf("criterion %d %s: %s (%.2fs)%s\n", n, title, o.pass ? "PASS" : "FAIL", secs, o.detail.str().c_str());
  std::fflush(stdout);
}

Scenario load(const std::string& name) {
  std::ifstream f(std::string(ANONMUTEX_SCENARIO_DIR) + "/" + name);
  if (!f) throw Error(ErrorKind::InvalidArgument, "missing scenario " + name);
  return parse_scenario(f);
}

NamingAssignment shuffled(int m, std::mt19937_64& rng) {
  std::vector<int> t(m);
  std::iota(t.begin(), t.end(), 1);
  std::shuffle(t.begin(), t.end(), rng);
  return NamingAssignment(t);
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

void m5_counterexample(Outcome& o) {
  const ScenarioResult r = replay_scenario(load("m5-counterexample.scn"));
  o.require(!r.diverged, "schedule replays as written: " + r.divergence);
  o.require(r.violation_seen && r.final_state.in_critical() == 2, "both processes in their critical sections");
  o.require(r.ok(), "expectation met");
  o.detail << " events=" << r.run.size();
}

void race_condition(Outcome& o) {
  const Scenario sc = load("race-condition.scn");
  const ScenarioResult nogate = replay_scenario(sc);
  o.require(!nogate.diverged && nogate.violation_seen, "violation without the gate");
  const ScenarioResult gated = replay_scenario(sc, "fig1");
  o.require(!gated.violation_seen, "no violation with the gate");
  o.detail << " no-gate events=" << nogate.run.size() << " gated prefix=" << gated.run.size()
           << (gated.diverged ? " (stops at line " + std::to_string(gated.divergence_line) + ")" : "");
}

void fuzz_campaign(Outcome& o) {
  FuzzConfig cfg;
  const auto prog = make_program("fig1", 7);
  cfg.programs = {prog, prog};
  cfg.m = 7;
  cfg.permutations = parse_permutation_spec("sample:64:seed42");
  cfg.schedules = 10'000;
  cfg.steps = 10'000;
  cfg.seed = 1;
  cfg.workers = workers();
  const FuzzReport r = fuzz_schedules(cfg);
  o.require(r.schedules == 10'000, "all schedules ran");
  o.require(r.permutations_covered == 65, "64 samples plus the fixed pair");
  o.require(r.mutex_violations == 0, "no mutex violation");
  o.require(r.progress_flags == 0, "no progress flag");
  o.require(r.memoryless_breaches == 0, "no memoryless breach");
  o.detail << " steps=" << r.steps << " mutex=" << r.mutex_violations << " flags=" << r.progress_flags
           << " breaches=" << r.memoryless_breaches;
}

void exhaustive(Outcome& o) {
  const auto prog = make_program("fig1", 7);
  const System sys(7, {{P, prog, NamingAssignment::identity(7)}, {Q, prog, NamingAssignment::reverse(7)}});
  ExplorationLimits limits;
  limits.max_states = 5'000'000;
  const StateGraph g = explore(sys, limits);
  const PropertyReport mutex = check_mutual_exclusion(g);
  const PropertyReport mem = check_memoryless(g);
  o.detail << " states=" << g.states() << (g.truncated() ? " (truncated)" : " (closed)")
           << " mutex=" << to_string(mutex.verdict) << " memoryless=" << to_string(mem.verdict);
  if (mutex.witness) {
    o.detail << " witness_events=" << mutex.witness->run.size();
    const std::string v = validate_witness(sys, *mutex.witness);
    o.detail << " witness_replays=" << (v.empty() ? "yes" : v);
  }
  o.require(mutex.verdict == Verdict::HoldsWithinBounds, "mutual exclusion holds within bounds");
  o.require(mem.verdict == Verdict::HoldsWithinBounds, "memoryless holds within bounds");
  if (!g.truncated()) {
    const PropertyReport sf = check_starvation_freedom(g);
    const PropertyReport df = check_deadlock_freedom(g);
    o.detail << " starvation=" << to_string(sf.verdict) << " deadlock=" << to_string(df.verdict);
    o.require(sf.verdict == Verdict::HoldsWithinBounds, "starvation freedom");
    o.require(df.verdict == Verdict::HoldsWithinBounds, "deadlock freedom");
  }
}

void lockstep(Outcome& o) {
  for (int m : {7, 9}) {
    const auto t0 = std::chrono::steady_clock::now();
    const SymmetricRunResult r = lockstep_construct(make_program("fig1", m), m, 100'000);
    const std::size_t half = static_cast<std::size_t>((m + 1) / 2);
    std::set<int> all = r.all_writes_p;
    all.insert(r.all_writes_q.begin(), r.all_writes_q.end());
    std::size_t prefix = 0;
    while (prefix < r.checkpoints.size() && r.checkpoints[prefix]) ++prefix;
    const std::string at = " (m=" + std::to_string(m) + ")";
    o.require(r.writes_p.size() == half && r.writes_q.size() == half, "distinct writes per process" + at);
    o.require(all.size() == static_cast<std::size_t>(m), "all registers written" + at);
    o.require(!r.checkpoints.empty() && prefix + 1 == r.checkpoints.size(), "checkpoints true before the self-pair write" + at);
    o.require(r.cs_entries_p == 1 && r.cs_entries_q == 1 && r.cs_exits_p == 1 && r.cs_exits_q == 1,
              "one entry and exit each" + at);
    o.require(r.final_state.quiescent() && r.final_state.memory == new_memory(m), "final state equals initial" + at);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < 10, "under 10 seconds" + at);
    o.detail << " m=" << m << ": writes " << r.writes_p.size() << "/" << r.writes_q.size() << " union " << all.size()
             << " checkpoints " << prefix << "+" << r.checkpoints.size() - prefix;
  }
}

void even_m(Outcome& o) {
  for (int m : {4, 6, 8}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto prog = make_program("fig1", m, true);
    const EvenMResult r = even_m_drive(prog, m, 100'000);
    const std::string at = " (m=" + std::to_string(m) + ")";
    o.detail << " m=" << m << ": " << to_string(r.outcome);
    o.require(r.outcome == EvenMOutcome::DeadlockCycle && r.witness, "deadlock-cycle witness" + at);
    const Run& run = r.witness ? r.witness->run : r.run;
    bool entered = false;
    for (const Event& e : run.events) entered = entered || e.kind == EventKind::EnterCS;
    o.require(!entered, "no critical-section entry" + at);
    if (r.witness) {
      const System sys(m, {{P, prog, run.assignments[0]}, {Q, prog, run.assignments[1]}});
      const GlobalState a = sys.replay(run.prefix(r.witness->prefix_length));
      const GlobalState b = sys.replay(run);
      o.require(a == b && r.witness->cycle_length > 0, "replay repeats the state" + at);
      o.require(is_symmetric_state(b, P, Q, run.assignments[0], run.assignments[1]), "repeated state is symmetric" + at);
      o.detail << " prefix " << r.witness->prefix_length << " cycle " << r.witness->cycle_length;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < 60, "under a minute" + at);
  }
}

void hiding(Outcome& o) {
  const auto prog = make_program("fig1", 7);
  const HidingReport r = hiding_drive({prog, prog, prog}, P, Q, R, 7, 10);
  bool all_hidden = true;
  for (const HidingCycle& c : r.cycles) all_hidden = all_hidden && c.hidden && c.looks_erased;
  o.require(all_hidden, "q hidden at every cycle boundary");
  o.detail << " cycles=" << r.cycles_completed << " outcome=" << to_string(r.outcome);
  if (r.outcome == HidingOutcome::QEnteredCSWhileHidden) {
    o.require(r.violation.has_value(), "violation run attached");
    if (r.violation) {
      const System sys(7, {{P, prog, r.violation->assignment(P)},
                           {Q, prog, r.violation->assignment(Q)},
                           {R, prog, r.violation->assignment(R)}});
      const GlobalState end = sys.replay(*r.violation);
      o.require(end.in_critical() == 2, "violation run ends with two processes in critical sections");
      o.detail << " violation_events=" << r.violation->size();
    }
  } else {
    o.require(r.cycles_completed == 10, "ten cycles");
  }
}

void rmr(Outcome& o) {
  std::vector<double> totals;
  const std::vector<int> ms = {7, 9, 11};
  for (int m : ms) {
    const SoloResult s = run_solo(make_program("fig1", m), P, new_memory(m), NamingAssignment::identity(m), 100'000);
    const std::size_t t = rmr_count(s.run).sum();
    o.require(s.completed, "solo passage completes");
    o.require(t <= static_cast<std::size_t>(10 * m), "solo total at most 10m (m=" + std::to_string(m) + ")");
    totals.push_back(static_cast<double>(t));
    const SymmetricRunResult c = lockstep_construct(make_program("fig1", m), m, 100'000);
    const std::size_t half = static_cast<std::size_t>((m + 1) / 2);
    o.require(c.writes_p.size() == half && c.writes_q.size() == half,
              "contended distinct writes (m=" + std::to_string(m) + ")");
    o.detail << " m=" << m << ": solo " << t << " contended " << c.writes_p.size() << "/" << c.writes_q.size();
  }
  for (std::size_t i = 1; i < ms.size(); ++i)
    o.require(totals[i] / totals[i - 1] <= 1.5 * ms[i] / ms[i - 1], "linear growth");
}

void model_layer(Outcome& o) {
  std::mt19937_64 rng(314);

  // looks_like: equivalence laws on a small run space.
  std::vector<Run> runs;
  for (int n = 0; n < 60; ++n) {
    Run run;
    run.initial = new_memory(2);
    run.procs = {P, Q};
    run.assignments = {NamingAssignment::identity(2), NamingAssignment::identity(2)};
    GlobalState s = start_state(run);
    const int len = static_cast<int>(rng() % 4);
    for (int e = 0; e < len; ++e) {
      const ProcessId a = rng() % 2 ? P : Q;
      const int r = 1 + static_cast<int>(rng() % 2);
      Event ev{a, rng() % 2 ? EventKind::Read : EventKind::Write, r, r, {}};
      ev.value = ev.is_read() ? s.memory[r] : (rng() % 2 ? RegisterValue::owned(a) : RegisterValue::free());
      apply_event_in_place(s, ev);
      run.events.push_back(ev);
    }
    runs.push_back(run);
  }
  bool laws = true;
  for (ProcessId p : {P, Q})
    for (const Run& x : runs) {
      laws = laws && looks_like(x, x, p);
      for (const Run& y : runs) {
        if (looks_like(x, y, p) != looks_like(y, x, p)) laws = false;
        if (!looks_like(x, y, p)) continue;
        for (const Run& z : runs)
          if (looks_like(y, z, p) && !looks_like(x, z, p)) laws = false;
      }
    }
  o.require(laws, "looks_like is an equivalence relation");

  // swap_naming involution.
  bool involution = true;
  for (int t = 0; t < 1000; ++t) {
    const int m = 1 + static_cast<int>(rng() % 12);
    const NamingAssignment pi = shuffled(m, rng);
    const int i = 1 + static_cast<int>(rng() % m), j = 1 + static_cast<int>(rng() % m);
    involution = involution && swap_naming(swap_naming(pi, i, j), i, j) == pi;
  }
  o.require(involution, "swap_naming is an involution");

  // swap_run on valid instances.
  int swaps_ok = 0;
  for (int t = 0; t < 1000; ++t) {
    const int m = 3 + static_cast<int>(rng() % 7);
    Run run;
    run.initial = new_memory(m);
    run.procs = {P, Q};
    run.assignments = {shuffled(m, rng), shuffled(m, rng)};
    const int i = 1 + static_cast<int>(rng() % m), j = 1 + static_cast<int>(rng() % m);
    const int ri = run.assignments[0](i), rj = run.assignments[0](j);
    GlobalState s = start_state(run);
    const int len = static_cast<int>(rng() % 40);
    for (int e = 0; e < len; ++e) {
      const int who = static_cast<int>(rng() % 2);
      const int logical = 1 + static_cast<int>(rng() % m);
      const int phys = run.assignments[who](logical);
      const bool write = rng() % 2 && phys != ri && phys != rj;
      Event ev{run.procs[who], write ? EventKind::Write : EventKind::Read, logical, phys,
               write ? RegisterValue::owned(run.procs[who]) : s.memory[phys]};
      apply_event_in_place(s, ev);
      run.events.push_back(ev);
    }
    try {
      const Run y = swap_run(run, P, i, j);
      replay(y);
      swaps_ok += y.size() == run.size() && replay(y).memory == s.memory;
    } catch (const Error&) {
    }
  }
  o.require(swaps_ok == 1000, "swap_run replays on 1000 instances");

  // is_symmetric_state argument symmetry.
  bool arg_sym = true;
  const RegisterValue vals[] = {RegisterValue::free(), RegisterValue::waiting(), RegisterValue::owned(P),
                                RegisterValue::owned(Q)};
  for (int t = 0; t < 1000; ++t) {
    const int m = 1 + static_cast<int>(rng() % 5);
    const NamingAssignment a = shuffled(m, rng), c = shuffled(m, rng);
    Run run;
    run.initial = new_memory(m);
    run.procs = {P, Q};
    run.assignments = {a, c};
    GlobalState s = start_state(run);
    for (int r = 1; r <= m; ++r) s.memory.set(r, vals[rng() % 4]);
    arg_sym = arg_sym && is_symmetric_state(s, P, Q, a, c) == is_symmetric_state(s, Q, P, c, a);
  }
  o.require(arg_sym, "is_symmetric_state argument symmetry");

  // Identifier relabeling invariance on random fig1 runs.
  int relabel_ok = 0;
  const auto prog = make_program("fig1", 7);
  for (int t = 0; t < 1000; ++t) {
    const System sys(7, {{P, prog, shuffled(7, rng)}, {Q, prog, shuffled(7, rng)}});
    Execution ex(sys);
    const int len = 1 + static_cast<int>(rng() % 300);
    for (int e = 0; e < len; ++e) ex.step(static_cast<int>(rng() % 2));
    const ProcessId a(1000 + static_cast<std::uint32_t>(rng() % 1000)), b(3000 + static_cast<std::uint32_t>(rng() % 1000));
    const Run moved = relabel_ids(ex.run(), {{P, a}, {Q, b}});
    const System other(7, {{a, prog, sys.member(0).naming}, {b, prog, sys.member(1).naming}});
    try {
      relabel_ok += other.replay(moved).sections == ex.state().sections;
    } catch (const Error&) {
    }
  }
  o.require(relabel_ok == 1000, "relabeled fig1 runs replay");
  o.detail << " swaps=" << swaps_ok << " relabels=" << relabel_ok;
}

}  // namespace

int main() {
  criterion(1, "m=5 counterexample", 1, m5_counterexample);
  criterion(2, "race condition without the gate", 1, race_condition);
  criterion(3, "fuzz campaign fig1 m=7", 600, fuzz_campaign);
  criterion(4, "bounded exploration fig1 m=7", 1800, exhaustive);
  criterion(5, "lock-step construction m=7, m=9", 20, lockstep);
  criterion(6, "even-m drive m=4,6,8", 180, even_m);
  criterion(7, "hiding drive fig1 x3 m=7 K=10", 60, hiding);
  criterion(8, "RMR bounds", 10, rmr);
  criterion(9, "model-layer property suite", 120, model_layer);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
