#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "anonmutex/error.hpp"
#include "anonmutex/registry.hpp"
#include "anonmutex/run_io.hpp"
#include "anonmutex/system.hpp"

namespace anonmutex {

/// A named interleaving over named processes, with expectations checked on
/// the resulting run.
///
///   name <text>
///   m <count>
///   allow-invalid-m
///   init <token> ... (m tokens; default all 0)
///   proc <name> <program> [id <n>]
///   assign <name> identity | reverse | <physical> ... (m entries)
///   step <name> <kind> [<physical>]
///   run <name> to <kind> [<physical>] [any]
///   expect mutex-violated | no-violation | waiting-count <n> | section <name> <section>
///
/// `step` performs exactly the named action. `run` lets the process take
/// steps until its next action is the named one (not performing it); the
/// steps in between must be reads unless `any` is given.
struct Scenario {
  struct Proc {
    std::string name;
    std::string program;
    ProcessId id;
    std::optional<NamingAssignment> naming;
  };
  struct Directive {
    enum class Kind { Step, RunTo } kind = Kind::Step;
    int line = 0;
    std::string proc;
    EventKind event = EventKind::Read;
    int physical = 0;  // 0 = any register
    bool any = false;
  };
  struct Expectation {
    enum class Kind { MutexViolated, NoViolation, WaitingCount, SectionIs } kind = Kind::MutexViolated;
    int count = 0;
    std::string proc;
    Section section = Section::Remainder;
    std::string text;
  };

  std::string name;
  int m = 0;
  bool allow_invalid_m = false;
  std::optional<MemoryState> initial;
  std::vector<Proc> procs;
  std::vector<Directive> schedule;
  std::vector<Expectation> expectations;

  int index_of(const std::string& proc) const {
    for (std::size_t i = 0; i < procs.size(); ++i)
      if (procs[i].name == proc) return static_cast<int>(i);
    return -1;
  }
};

namespace detail {

inline Section parse_section(const std::string& s, int line) {
  for (Section v : {Section::Remainder, Section::Entry, Section::Critical, Section::Exit})
    if (s == to_string(v)) return v;
  throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": unknown section '" + s + "'");
}

}  // namespace detail

inline Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  std::string text;
  int line = 0;
  auto fail = [&](const std::string& why) { return Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + why); };
  auto proc_ref = [&](const std::string& name) {
    const int i = sc.index_of(name);
    if (i < 0) throw fail("unknown process '" + name + "'");
    return i;
  };
  while (std::getline(in, text)) {
    ++line;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    std::istringstream ls(text);
    std::vector<std::string> w;
    for (std::string tok; ls >> tok;) w.push_back(tok);
    if (w.empty()) continue;
    const std::string& key = w[0];
    if (key == "name") {
      if (w.size() < 2) throw fail("name needs a value");
      sc.name = w[1];
    } else if (key == "m") {
      if (w.size() != 2) throw fail("m takes one value");
      sc.m = detail::parse_int(w[1], line);
      if (sc.m < 1) throw fail("m must be at least 1");
    } else if (key == "allow-invalid-m") {
      sc.allow_invalid_m = true;
    } else if (key == "init") {
      std::vector<RegisterValue> vals;
      for (std::size_t i = 1; i < w.size(); ++i) vals.push_back(value_from_token(w[i]));
      if (vals.empty()) throw fail("init needs values");
      sc.initial = MemoryState(std::move(vals));
    } else if (key == "proc") {
      if (w.size() != 3 && !(w.size() == 5 && w[3] == "id")) throw fail("expected: proc <name> <program> [id <n>]");
      if (sc.index_of(w[1]) >= 0) throw fail("duplicate process '" + w[1] + "'");
      Scenario::Proc p;
      p.name = w[1];
      p.program = w[2];
      p.id = w.size() == 5 ? detail::parse_id(w[4], line) : ProcessId(static_cast<std::uint32_t>(sc.procs.size() + 1));
      for (const auto& other : sc.procs)
        if (other.id == p.id) throw fail("duplicate process id");
      sc.procs.push_back(std::move(p));
    } else if (key == "assign") {
      if (w.size() < 3) throw fail("expected: assign <name> identity|reverse|<table>");
      if (sc.m < 1) throw fail("m must precede assign");
      auto& p = sc.procs[proc_ref(w[1])];
      if (w[2] == "identity") {
        p.naming = NamingAssignment::identity(sc.m);
      } else if (w[2] == "reverse") {
        p.naming = NamingAssignment::reverse(sc.m);
      } else {
        std::vector<int> t;
        for (std::size_t i = 2; i < w.size(); ++i) t.push_back(detail::parse_int(w[i], line));
        if (static_cast<int>(t.size()) != sc.m) throw fail("naming table needs m entries");
        try {
          p.naming = NamingAssignment(std::move(t));
        } catch (const Error& e) {
          throw fail(e.what());
        }
      }
    } else if (key == "step" || key == "run") {
      Scenario::Directive d;
      d.line = line;
      std::size_t at = 2;
      if (w.size() < 3) throw fail("missing process or action");
      d.proc = w[1];
      proc_ref(d.proc);
      if (key == "run") {
        d.kind = Scenario::Directive::Kind::RunTo;
        if (w[2] != "to" || w.size() < 4) throw fail("expected: run <name> to <kind> [register] [any]");
        at = 3;
      }
      d.event = detail::parse_event_kind(w[at], line);
      ++at;
      if (at < w.size() && w[at] != "any") d.physical = detail::parse_int(w[at++], line);
      if (at < w.size() && w[at] == "any" && key == "run") {
        d.any = true;
        ++at;
      }
      if (at != w.size()) throw fail("trailing words");
      if (d.physical != 0 && (d.physical < 1 || d.physical > sc.m)) throw fail("register index out of range");
      sc.schedule.push_back(d);
    } else if (key == "expect") {
      if (w.size() < 2) throw fail("expect needs a verdict");
      Scenario::Expectation e;
      e.text = text.substr(text.find("expect") + 7);
      while (!e.text.empty() && std::isspace(static_cast<unsigned char>(e.text.back()))) e.text.pop_back();
      if (w[1] == "mutex-violated" && w.size() == 2) {
        e.kind = Scenario::Expectation::Kind::MutexViolated;
      } else if (w[1] == "no-violation" && w.size() == 2) {
        e.kind = Scenario::Expectation::Kind::NoViolation;
      } else if (w[1] == "waiting-count" && w.size() == 3) {
        e.kind = Scenario::Expectation::Kind::WaitingCount;
        e.count = detail::parse_int(w[2], line);
      } else if (w[1] == "section" && w.size() == 4) {
        e.kind = Scenario::Expectation::Kind::SectionIs;
        e.proc = w[2];
        proc_ref(e.proc);
        e.section = detail::parse_section(w[3], line);
      } else {
        throw fail("unknown expectation '" + w[1] + "'");
      }
      sc.expectations.push_back(e);
    } else {
      throw fail("unknown directive '" + key + "'");
    }
  }
  if (sc.m < 1) throw Error(ErrorKind::Parse, "scenario does not set m");
  if (sc.procs.empty()) throw Error(ErrorKind::Parse, "scenario declares no process");
  if (sc.initial && sc.initial->size() != sc.m) throw Error(ErrorKind::Parse, "init does not list m values");
  return sc;
}

inline Scenario parse_scenario(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

struct ScenarioResult {
  std::string name;
  Run run;
  std::vector<std::string> programs;  // parallel to run.procs
  bool diverged = false;
  int divergence_line = 0;
  std::size_t divergence_directive = 0;
  std::string divergence;
  bool violation_seen = false;  // two processes in their critical sections at some point
  std::vector<ProcessId> violators;
  GlobalState final_state;
  struct Check {
    std::string text;
    bool met = false;
    std::string detail;
  };
  std::vector<Check> checks;

  bool ok() const {
    if (diverged) return false;
    for (const auto& c : checks)
      if (!c.met) return false;
    return true;
  }
};

/// Replays the schedule. A divergence stops the replay; expectations are
/// still evaluated on the prefix that ran. `program_override`, when set,
/// replaces every process's program.
inline ScenarioResult replay_scenario(const Scenario& sc, const std::string& program_override = "",
                                      std::size_t run_cap = 100'000) {
  ScenarioResult res;
  res.name = sc.name;
  std::vector<System::Member> members;
  for (const auto& p : sc.procs) {
    const std::string prog = program_override.empty() ? p.program : program_override;
    members.push_back({p.id, make_program(prog, sc.m, sc.allow_invalid_m),
                       p.naming ? *p.naming : NamingAssignment::identity(sc.m)});
    res.programs.push_back(prog);
  }
  const System sys(sc.m, std::move(members));
  Execution ex(sys, sc.initial ? *sc.initial : new_memory(sc.m));

  auto describe = [&](const Action& a, int who) {
    std::string s = to_string(a.kind);
    if (a.is_access()) s += " r" + std::to_string(sys.member(who).naming(a.logical));
    if (a.kind == ActionKind::Write) s += " " + to_token(a.value);
    return s;
  };
  auto wanted = [](const Scenario::Directive& d) {
    std::string s = to_string(d.event);
    if (d.physical) s += " r" + std::to_string(d.physical);
    return s;
  };
  auto matches = [&](const Action& a, int who, const Scenario::Directive& d) {
    if (a.kind == ActionKind::StayRemainder || event_kind_of(a.kind) != d.event) return false;
    return d.physical == 0 || !a.is_access() || sys.member(who).naming(a.logical) == d.physical;
  };
  auto note_violation = [&] {
    if (ex.state().in_critical() >= 2 && !res.violation_seen) {
      res.violation_seen = true;
      for (std::size_t i = 0; i < sys.procs().size(); ++i)
        if (ex.state().sections[i] == Section::Critical) res.violators.push_back(sys.procs()[i]);
    }
  };
  auto diverge = [&](std::size_t idx, const Scenario::Directive& d, const std::string& why) {
    res.diverged = true;
    res.divergence_directive = idx;
    res.divergence_line = d.line;
    res.divergence = why;
  };

  for (std::size_t idx = 0; idx < sc.schedule.size() && !res.diverged; ++idx) {
    const auto& d = sc.schedule[idx];
    const int who = sc.index_of(d.proc);
    if (d.kind == Scenario::Directive::Kind::Step) {
      const Action a = ex.next_action(who);
      if (!matches(a, who, d)) {
        diverge(idx, d, "expected " + d.proc + " " + wanted(d) + ", actual " + describe(a, who));
        break;
      }
      ex.step(who);
      note_violation();
      continue;
    }
    for (std::size_t n = 0;; ++n) {
      const Action a = ex.next_action(who);
      if (matches(a, who, d)) break;
      if (a.kind == ActionKind::StayRemainder || (!d.any && a.kind != ActionKind::Read) || n >= run_cap) {
        diverge(idx, d, "expected " + d.proc + " to reach " + wanted(d) + ", actual " + describe(a, who));
        break;
      }
      ex.step(who);
      note_violation();
    }
  }

  res.final_state = ex.state();
  res.run = ex.run();
  for (const auto& e : sc.expectations) {
    ScenarioResult::Check c;
    c.text = e.text;
    switch (e.kind) {
      case Scenario::Expectation::Kind::MutexViolated:
        c.met = res.violation_seen;
        c.detail = res.violation_seen ? "two processes in their critical sections" : "no mutual exclusion violation";
        break;
      case Scenario::Expectation::Kind::NoViolation:
        c.met = !res.violation_seen;
        c.detail = res.violation_seen ? "two processes in their critical sections" : "no mutual exclusion violation";
        break;
      case Scenario::Expectation::Kind::WaitingCount: {
        int n = 0;
        for (const auto& v : res.final_state.memory.values()) n += v.is_waiting();
        c.met = n == e.count;
        c.detail = std::to_string(n) + " register(s) hold waiting";
        break;
      }
      case Scenario::Expectation::Kind::SectionIs: {
        const Section s = res.final_state.sections[sc.index_of(e.proc)];
        c.met = s == e.section;
        c.detail = e.proc + " is in " + to_string(s);
        break;
      }
    }
    res.checks.push_back(c);
  }
  return res;
}

/// Scenario text that replays `run` event by event.
inline std::string scenario_text(const Run& run, const std::vector<std::string>& programs, const std::string& name,
                                 const std::string& expectation) {
  std::ostringstream out;
  out << "name " << name << "\n";
  out << "m " << run.registers() << "\n";
  out << "allow-invalid-m\n";
  bool all_free = true;
  for (const auto& v : run.initial.values()) all_free = all_free && v.is_free();
  if (!all_free) {
    out << "init";
    for (const auto& v : run.initial.values()) out << ' ' << to_token(v);
    out << "\n";
  }
  for (std::size_t i = 0; i < run.procs.size(); ++i) {
    const std::string p = "p" + std::to_string(run.procs[i].token());
    out << "proc " << p << ' ' << programs.at(i) << " id " << run.procs[i].token() << "\n";
    out << "assign " << p << ' ' << to_string(run.assignments[i]) << "\n";
  }
  for (const Event& e : run.events) {
    out << "step p" << e.actor.token() << ' ' << to_string(e.kind);
    if (e.is_access()) out << ' ' << e.physical;
    out << "\n";
  }
  if (!expectation.empty()) out << "expect " << expectation << "\n";
  return out.str();
}

}  // namespace anonmutex
