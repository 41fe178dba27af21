#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "anonmutex/error.hpp"
#include "anonmutex/naming.hpp"
#include "anonmutex/program.hpp"
#include "anonmutex/run.hpp"
#include "anonmutex/state.hpp"

namespace anonmutex {

inline EventKind event_kind_of(ActionKind k) {
  switch (k) {
    case ActionKind::Read: return EventKind::Read;
    case ActionKind::Write: return EventKind::Write;
    case ActionKind::EnterCS: return EventKind::EnterCS;
    case ActionKind::ExitCS: return EventKind::ExitCS;
    case ActionKind::EnterRemainder: return EventKind::EnterRemainder;
    case ActionKind::StayRemainder: break;
  }
  throw Error(ErrorKind::Protocol, "stay-remainder is not an event");
}

/// A set of processes, each with a program and a naming assignment, over m
/// registers. Stateless: all operations take the global state explicitly.
class System {
 public:
  struct Member {
    ProcessId id;
    ProgramPtr program;
    NamingAssignment naming;
  };

  System(int m, std::vector<Member> members) : m_(m), members_(std::move(members)) {
    if (m < 1) throw Error(ErrorKind::InvalidConfiguration, "register count must be at least 1");
    if (members_.empty()) throw Error(ErrorKind::InvalidConfiguration, "a system needs at least one process");
    for (std::size_t i = 0; i < members_.size(); ++i) {
      const Member& mb = members_[i];
      if (!mb.id.valid() || !mb.program) throw Error(ErrorKind::InvalidConfiguration, "incomplete process entry");
      if (mb.naming.size() != m_)
        throw Error(ErrorKind::InvalidConfiguration, "naming assignment is not over " + std::to_string(m_) + " registers");
      if (mb.program->registers() != m_)
        throw Error(ErrorKind::InvalidConfiguration, "program " + mb.program->name() + " built for a different m");
      for (std::size_t k = 0; k < i; ++k)
        if (members_[k].id == mb.id) throw Error(ErrorKind::InvalidConfiguration, "duplicate process id");
      procs_.push_back(mb.id);
    }
  }

  int registers() const noexcept { return m_; }
  int size() const noexcept { return static_cast<int>(members_.size()); }
  const std::vector<ProcessId>& procs() const noexcept { return procs_; }
  const Member& member(int who) const { return members_.at(who); }
  const std::vector<Member>& members() const noexcept { return members_; }

  int index_of(ProcessId id) const {
    for (int i = 0; i < size(); ++i)
      if (procs_[i] == id) return i;
    throw Error(ErrorKind::InvalidArgument, "process id:" + std::to_string(id.token()) + " not in system");
  }

  std::vector<NamingAssignment> assignments() const {
    std::vector<NamingAssignment> out;
    for (const Member& mb : members_) out.push_back(mb.naming);
    return out;
  }

  System with_naming(int who, NamingAssignment naming) const {
    std::vector<Member> mbs = members_;
    mbs.at(who).naming = std::move(naming);
    return System(m_, std::move(mbs));
  }

  GlobalState initial_state(const MemoryState& memory) const {
    if (memory.size() != m_) throw Error(ErrorKind::InvalidConfiguration, "memory size differs from m");
    GlobalState s;
    s.memory = memory;
    s.procs = procs_;
    for (const Member& mb : members_) s.locals.push_back(mb.program->initial(mb.id));
    s.sections.assign(members_.size(), Section::Remainder);
    return s;
  }
  GlobalState initial_state() const { return initial_state(new_memory(m_)); }

  Run empty_run(const MemoryState& memory) const {
    Run r;
    r.initial = memory;
    r.procs = procs_;
    r.assignments = assignments();
    return r;
  }
  Run empty_run() const { return empty_run(new_memory(m_)); }

  /// The action process `who` performs when next scheduled. A process in
  /// its remainder section is first given the begin-entry signal.
  Action next_action(const GlobalState& s, int who) const {
    const ProcessProgram& prog = *members_[who].program;
    if (s.sections[who] == Section::Remainder) {
      LocalState probe = s.locals[who];
      prog.begin_entry(probe);
      return prog.pending(probe);
    }
    return prog.pending(s.locals[who]);
  }

  /// Schedules `who` for one atomic step and returns the event it produced.
  Event execute(GlobalState& s, int who) const {
    const Member& mb = members_[who];
    const ProcessProgram& prog = *mb.program;
    LocalState& local = s.locals[who];
    if (s.sections[who] == Section::Remainder) prog.begin_entry(local);
    const Action a = prog.pending(local);
    Event e;
    e.actor = mb.id;
    e.kind = event_kind_of(a.kind);
    std::optional<RegisterValue> result;
    if (a.is_access()) {
      e.logical = a.logical;
      e.physical = mb.naming(a.logical);
      if (a.kind == ActionKind::Read) {
        e.value = s.memory[e.physical];
        result = e.value;
      } else {
        if (a.value.is_id() && !(a.value.owner() == mb.id))
          throw Error(ErrorKind::Protocol, "process writes an identifier other than its own");
        e.value = a.value;
      }
    }
    apply_event_in_place(s, e);
    prog.advance(local, result);
    return e;
  }

  /// Program-level replay: every event must be exactly the action its actor
  /// would take. Returns the final global state.
  GlobalState replay(const Run& run) const {
    check_compatible(run);
    GlobalState s = initial_state(run.initial);
    for (std::size_t i = 0; i < run.events.size(); ++i) replay_one(s, run.events[i], i);
    return s;
  }

  /// Applies one recorded event to `s`, checking it against the program.
  void replay_one(GlobalState& s, const Event& recorded, std::size_t position = 0) const {
    const int who = index_of(recorded.actor);
    const Action a = next_action(s, who);
    auto diverge = [&](const std::string& why) {
      return Error(ErrorKind::ReplayDivergence, "event " + std::to_string(position) + " by id:" +
                                                    std::to_string(recorded.actor.token()) + ": " + why);
    };
    if (a.kind == ActionKind::StayRemainder || event_kind_of(a.kind) != recorded.kind)
      throw diverge(std::string("program performs ") + to_string(a.kind) + ", run records " + to_string(recorded.kind));
    if (a.is_access() && a.logical != recorded.logical)
      throw diverge("program accesses logical " + std::to_string(a.logical) + ", run records " +
                    std::to_string(recorded.logical));
    if (a.kind == ActionKind::Write && !(a.value == recorded.value))
      throw diverge("program writes " + to_token(a.value) + ", run records " + to_token(recorded.value));
    if (recorded.is_access() && members_[who].naming(recorded.logical) != recorded.physical)
      throw Error(ErrorKind::InvalidEvent, "physical index does not match the naming assignment");
    if (recorded.is_read() && !(s.memory[recorded.physical] == recorded.value))
      throw diverge("read returns " + to_token(s.memory[recorded.physical]) + ", run records " +
                    to_token(recorded.value));
    execute(s, who);
  }

  void check_compatible(const Run& run) const {
    if (run.registers() != m_) throw Error(ErrorKind::InvalidArgument, "run is over a different m");
    if (run.procs != procs_) throw Error(ErrorKind::InvalidArgument, "run and system list different processes");
    if (run.assignments != assignments())
      throw Error(ErrorKind::InvalidArgument, "run and system use different naming assignments");
  }

 private:
  int m_;
  std::vector<Member> members_;
  std::vector<ProcessId> procs_;
};

/// A run under construction together with its current global state.
class Execution {
 public:
  Execution(const System& sys, const MemoryState& memory)
      : sys_(&sys), state_(sys.initial_state(memory)), run_(sys.empty_run(memory)) {}
  explicit Execution(const System& sys) : Execution(sys, new_memory(sys.registers())) {}

  const System& system() const noexcept { return *sys_; }
  const GlobalState& state() const noexcept { return state_; }
  const Run& run() const noexcept { return run_; }
  Run take_run() && { return std::move(run_); }

  Action next_action(int who) const { return sys_->next_action(state_, who); }

  const Event& step(int who) {
    run_.events.push_back(sys_->execute(state_, who));
    return run_.events.back();
  }

  void append(const Event& e) {
    sys_->replay_one(state_, e, run_.events.size());
    run_.events.push_back(e);
  }

 private:
  const System* sys_;
  GlobalState state_;
  Run run_;
};

struct SoloResult {
  Run run;
  bool completed = false;  // returned to the remainder section
  GlobalState final_state;
};

/// Drives one process alone from remainder through a full passage, or until
/// step_cap events. Cap exhaustion is reported, not thrown.
inline SoloResult run_solo(ProgramPtr program, ProcessId pid, const MemoryState& memory,
                           const NamingAssignment& naming, std::size_t step_cap) {
  if (step_cap == 0) throw Error(ErrorKind::InvalidArgument, "step cap must be positive");
  System sys(memory.size(), {{pid, std::move(program), naming}});
  Execution ex(sys, memory);
  bool completed = false;
  while (ex.run().size() < step_cap) {
    const Event& e = ex.step(0);
    if (e.kind == EventKind::EnterRemainder) {
      completed = true;
      break;
    }
  }
  SoloResult out;
  out.final_state = ex.state();
  out.run = std::move(ex).take_run();
  out.completed = completed;
  return out;
}

/// Relabels every identifier occurrence: actors, process list and register
/// values. The map must cover every process of the run and be injective.
inline Run relabel_ids(const Run& run, const std::unordered_map<ProcessId, ProcessId>& bijection) {
  std::vector<ProcessId> images;
  for (ProcessId p : run.procs) {
    auto it = bijection.find(p);
    if (it == bijection.end())
      throw Error(ErrorKind::InvalidArgument, "relabeling misses id:" + std::to_string(p.token()));
    for (ProcessId seen : images)
      if (seen == it->second) throw Error(ErrorKind::InvalidArgument, "relabeling is not injective");
    images.push_back(it->second);
  }
  auto map_value = [&](RegisterValue v) {
    if (!v.is_id()) return v;
    auto it = bijection.find(v.owner());
    if (it == bijection.end())
      throw Error(ErrorKind::InvalidArgument, "relabeling misses id:" + std::to_string(v.owner().token()));
    return RegisterValue::owned(it->second);
  };
  Run out = run;
  out.procs = images;
  std::vector<RegisterValue> init;
  for (const RegisterValue& v : run.initial.values()) init.push_back(map_value(v));
  out.initial = MemoryState(std::move(init));
  for (Event& e : out.events) {
    e.actor = bijection.at(e.actor);
    e.value = map_value(e.value);
  }
  return out;
}

}  // namespace anonmutex
