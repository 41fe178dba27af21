#pragma once

#include <optional>
#include <string>
#include <vector>

#include "anonmutex/adversary/lockstep.hpp"

namespace anonmutex {

enum class HidingOutcome { StillHiddenAfterK, QEnteredCSWhileHidden };

inline const char* to_string(HidingOutcome o) {
  switch (o) {
    case HidingOutcome::StillHiddenAfterK: return "still-hidden-after-k";
    case HidingOutcome::QEnteredCSWhileHidden: return "q-entered-cs-while-hidden";
  }
  return "?";
}

struct HidingCycle {
  int pair = 0;           // registry entry whose pair ran this cycle
  int q_register = 0;     // physical register q wrote, 0 when q did not write
  bool hidden = false;    // is_hidden(run, q) at the cycle boundary
  bool looks_erased = false;  // every non-q process sees the q-erased run
};

struct HidingReport {
  std::size_t cycles_completed = 0;
  std::vector<HidingCycle> cycles;
  HidingOutcome outcome = HidingOutcome::StillHiddenAfterK;
  Run run;                            // the constructed run so far
  std::optional<Run> violation;       // q and another process in their critical sections
  std::vector<ProcessId> violation_processes;
};

/// One registered quiescent memory with the pair of processes that runs the
/// lock-step construction from it.
struct QuiescentEntry {
  MemoryState memory;
  ProcessId first;
  ProcessId second;
};

struct HidingSetup {
  int m = 7;
  std::vector<ProcessId> procs;
  std::vector<ProgramPtr> programs;  // parallel to procs
  ProcessId q;
  NamingAssignment q_naming;  // defaults to the identity
  std::vector<QuiescentEntry> registry;
  std::size_t cycles = 10;
  std::size_t step_cap = 100'000;  // per cycle, for q's solo phase and each construction
};

namespace detail {

inline std::vector<ProcessId> others(const std::vector<ProcessId>& procs, ProcessId q) {
  std::vector<ProcessId> out;
  for (ProcessId p : procs)
    if (!(p == q)) out.push_back(p);
  return out;
}

/// The run with q's events removed: what everyone else would see had q
/// never left its remainder section.
inline Run erase_q(const Run& run, ProcessId q) { return erase_process(run, q); }

}  // namespace detail

/// Hides every write of q behind the lock-step runs of registered pairs.
///
/// Each cycle runs q alone until its next write (or critical-section
/// entry). The pair registered for the quiescent memory the other processes
/// currently see then runs its lock-step construction; the first write of
/// that run to q's register is preceded by q's write, so q's value is
/// overwritten before anyone reads it. The splice is an application of
/// extend_run with P = the pair. If q enters its critical section while
/// hidden, a member of the pair is run alone from the q-erased run into its
/// own critical section and the extension is returned as a violation.
inline HidingReport hiding_drive_multi_quiescent(const HidingSetup& setup) {
  const int m = setup.m;
  if (setup.procs.size() != setup.programs.size()) throw Error(ErrorKind::InvalidConfiguration, "one program per process");
  if (setup.registry.empty()) throw Error(ErrorKind::InvalidConfiguration, "no quiescent state registered");
  auto program_of = [&](ProcessId id) {
    for (std::size_t i = 0; i < setup.procs.size(); ++i)
      if (setup.procs[i] == id) return setup.programs[i];
    throw Error(ErrorKind::InvalidConfiguration, "process id:" + std::to_string(id.token()) + " has no program");
  };
  program_of(setup.q);

  // one construction per registered quiescent memory; its assignments are
  // fixed for the pair from then on
  std::vector<SymmetricRunResult> rho;
  std::vector<NamingAssignment> naming(setup.procs.size(), NamingAssignment::identity(m));
  for (const QuiescentEntry& e : setup.registry) {
    if (e.first == e.second || e.first == setup.q || e.second == setup.q)
      throw Error(ErrorKind::InvalidConfiguration, "each quiescent state needs two processes other than q");
    if (e.memory.size() != m) throw Error(ErrorKind::InvalidConfiguration, "registered memory has the wrong size");
    for (const SymmetricRunResult& r : rho)
      if (r.run.procs[0] == e.first || r.run.procs[0] == e.second || r.run.procs[1] == e.first ||
          r.run.procs[1] == e.second)
        throw Error(ErrorKind::InvalidConfiguration, "a process is associated with two quiescent states");
    ProgramPtr prog = program_of(e.first);
    if (program_of(e.second) != prog) throw Error(ErrorKind::InvalidConfiguration, "a pair must run the same program");
    {
      const System probe(m, {{e.first, prog, NamingAssignment::identity(m)}, {e.second, prog, NamingAssignment::reverse(m)}});
      if (!is_symmetric_state(probe.initial_state(e.memory), e.first, e.second, NamingAssignment::identity(m),
                              NamingAssignment::reverse(m)))
        throw Error(ErrorKind::SymmetryViolation, "registered quiescent state is not symmetric");
    }
    rho.push_back(lockstep_construct(prog, e.memory, setup.step_cap, e.first, e.second));
  }
  for (std::size_t i = 0; i < setup.procs.size(); ++i) {
    if (setup.procs[i] == setup.q && setup.q_naming.size() == m) naming[i] = setup.q_naming;
    for (const SymmetricRunResult& r : rho) {
      if (r.run.procs[0] == setup.procs[i]) naming[i] = r.pi_p;
      if (r.run.procs[1] == setup.procs[i]) naming[i] = r.pi_q;
    }
  }
  std::vector<System::Member> members;
  for (std::size_t i = 0; i < setup.procs.size(); ++i) members.push_back({setup.procs[i], setup.programs[i], naming[i]});
  const System sys(m, std::move(members));
  const int qi = sys.index_of(setup.q);
  const std::vector<ProcessId> rest = detail::others(setup.procs, setup.q);

  // the quiescent memory the non-q processes currently see
  auto identify = [&](const Run& run) -> int {
    const Run erased = detail::erase_q(run, setup.q);
    const GlobalState seen = sys.replay(erased);
    if (!seen.quiescent()) throw Error(ErrorKind::ConstructionInvariant, "pair did not return to quiescence");
    for (std::size_t i = 0; i < setup.registry.size(); ++i)
      if (setup.registry[i].memory == seen.memory) return static_cast<int>(i);
    throw Error(ErrorKind::UnknownQuiescent, "the run ends in an unregistered quiescent state");
  };

  HidingReport rep;
  Execution ex(sys, setup.registry.front().memory);
  for (std::size_t cycle = 0; cycle < setup.cycles; ++cycle) {
    const int entry = identify(ex.run());
    const SymmetricRunResult& r = rho[entry];
    const std::vector<ProcessId> pair = {setup.registry[entry].first, setup.registry[entry].second};

    // q alone until it is about to write or enter
    std::size_t budget = setup.step_cap;
    while (true) {
      const Action a = ex.next_action(qi);
      if (a.kind == ActionKind::Write || a.kind == ActionKind::EnterCS || a.kind == ActionKind::StayRemainder) break;
      if (budget-- == 0) throw Error(ErrorKind::CapExceeded, "q neither writes nor enters within the step cap");
      ex.step(qi);
    }
    const Action next = ex.next_action(qi);

    if (next.kind == ActionKind::EnterCS) {
      ex.step(qi);
      if (!is_hidden(ex.run(), setup.q)) throw Error(ErrorKind::ConstructionInvariant, "q entered without being hidden");
      // run a pair member alone from the q-erased run into its critical section
      const Run x = detail::erase_q(ex.run(), setup.q);
      Execution solo(sys, x.initial);
      for (const Event& e : x.events) solo.append(e);
      const int pi = sys.index_of(pair[0]);
      std::size_t left = setup.step_cap;
      while (true) {
        if (left-- == 0) throw Error(ErrorKind::CapExceeded, "pair member does not reach its critical section alone");
        if (solo.step(pi).kind == EventKind::EnterCS) break;
      }
      Run extended = extend_run(ex.run(), x, solo.run(), std::vector<ProcessId>{pair[0]});
      const GlobalState end = sys.replay(extended);
      if (end.section(setup.q) != Section::Critical || end.section(pair[0]) != Section::Critical)
        throw Error(ErrorKind::ConstructionInvariant, "extension does not put two processes in their critical sections");
      rep.outcome = HidingOutcome::QEnteredCSWhileHidden;
      rep.violation = std::move(extended);
      rep.violation_processes = {setup.q, pair[0]};
      rep.run = ex.run();
      return rep;
    }

    HidingCycle info;
    info.pair = entry;
    Run built = ex.run();
    auto lifted = [&](std::size_t upto) {  // built;rho[0..upto)
      Run out = built;
      out.events.insert(out.events.end(), r.run.events.begin(), r.run.events.begin() + static_cast<std::ptrdiff_t>(upto));
      return out;
    };
    if (next.kind == ActionKind::Write) {
      const int reg = sys.member(qi).naming(next.logical);
      std::size_t t = 0;
      while (t < r.run.size() && !(r.run.events[t].is_write() && r.run.events[t].physical == reg)) ++t;
      if (t == r.run.size())
        throw Error(ErrorKind::ConstructionInvariant, "the pair's run never writes register r" + std::to_string(reg));
      Execution qstep(sys, built.initial);
      for (const Event& e : built.events) qstep.append(e);
      for (std::size_t i = 0; i < t; ++i) qstep.append(r.run.events[i]);
      const Event qw = qstep.step(qi);
      const Run x = lifted(t + 1);
      Run y = lifted(t);
      y.events.push_back(qw);
      y.events.push_back(r.run.events[t]);
      const Run z = lifted(r.run.size());
      built = extend_run(y, x, z, pair);
      info.q_register = reg;
    } else {
      built = lifted(r.run.size());  // q stays in its remainder section
    }
    Execution next_ex(sys, built.initial);
    for (const Event& e : built.events) next_ex.append(e);
    ex = std::move(next_ex);

    info.hidden = is_hidden(ex.run(), setup.q);
    const Run erased = detail::erase_q(ex.run(), setup.q);
    info.looks_erased = true;
    for (ProcessId p : rest) info.looks_erased = info.looks_erased && looks_like(ex.run(), erased, p);
    rep.cycles.push_back(info);
    ++rep.cycles_completed;
  }
  rep.run = ex.run();
  return rep;
}

/// Memoryless case: p1 and p2 run from the all-free memory every cycle.
inline HidingReport hiding_drive(const std::vector<ProgramPtr>& programs, ProcessId p1, ProcessId p2, ProcessId q, int m,
                                 std::size_t cycles, std::size_t step_cap = 100'000) {
  if (programs.size() != 3) throw Error(ErrorKind::InvalidConfiguration, "the hiding drive takes three programs");
  if (m % 2 == 0) throw Error(ErrorKind::InvalidArgument, "the hiding drive needs an odd m");
  HidingSetup setup;
  setup.m = m;
  setup.procs = {p1, p2, q};
  setup.programs = programs;
  setup.q = q;
  setup.registry = {{new_memory(m), p1, p2}};
  setup.cycles = cycles;
  setup.step_cap = step_cap;
  return hiding_drive_multi_quiescent(setup);
}

}  // namespace anonmutex
