#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anonmutex/error.hpp"
#include "anonmutex/naming.hpp"
#include "anonmutex/state.hpp"

namespace anonmutex {

/// A finite run: a quiescent starting memory plus a sequence of events.
/// Every process starts in its remainder section at its program's initial
/// local state; `assignments` is parallel to `procs`.
struct Run {
  MemoryState initial;
  std::vector<ProcessId> procs;
  std::vector<NamingAssignment> assignments;
  std::vector<Event> events;

  int registers() const noexcept { return initial.size(); }
  std::size_t size() const noexcept { return events.size(); }

  int index_of(ProcessId id) const {
    auto it = std::find(procs.begin(), procs.end(), id);
    if (it == procs.end()) throw Error(ErrorKind::InvalidArgument, "process id:" + std::to_string(id.token()) + " not in run");
    return static_cast<int>(it - procs.begin());
  }
  bool involves(ProcessId id) const { return std::find(procs.begin(), procs.end(), id) != procs.end(); }

  const NamingAssignment& assignment(ProcessId id) const { return assignments[index_of(id)]; }

  Run prefix(std::size_t n) const {
    Run out = *this;
    out.events.resize(std::min(n, events.size()));
    return out;
  }

  /// x;seq
  Run then(std::span<const Event> seq) const {
    Run out = *this;
    out.events.insert(out.events.end(), seq.begin(), seq.end());
    return out;
  }

  friend bool operator==(const Run&, const Run&) = default;
};

inline bool is_prefix(const Run& x, const Run& y) {
  return x.initial == y.initial && x.procs == y.procs && x.assignments == y.assignments &&
         x.events.size() <= y.events.size() && std::equal(x.events.begin(), x.events.end(), y.events.begin());
}

/// (y - x) for a prefix x of y.
inline std::vector<Event> suffix(const Run& y, const Run& x) {
  if (!is_prefix(x, y)) throw Error(ErrorKind::InvalidArgument, "run is not a prefix");
  return {y.events.begin() + static_cast<std::ptrdiff_t>(x.events.size()), y.events.end()};
}

inline GlobalState start_state(const Run& run) {
  GlobalState s;
  s.memory = run.initial;
  s.procs = run.procs;
  s.sections.assign(run.procs.size(), Section::Remainder);
  return s;
}

/// Checks one event against the run's naming assignment before applying it.
inline void replay_event(const Run& run, GlobalState& state, const Event& e) {
  if (e.is_access()) {
    const NamingAssignment& pi = run.assignment(e.actor);
    if (e.logical < 1 || e.logical > pi.size())
      throw Error(ErrorKind::InvalidEvent, "logical index " + std::to_string(e.logical) + " out of range");
    if (pi(e.logical) != e.physical)
      throw Error(ErrorKind::InvalidEvent, "event resolves logical " + std::to_string(e.logical) + " to r" +
                                               std::to_string(e.physical) + " but the naming assignment gives r" +
                                               std::to_string(pi(e.logical)));
  }
  apply_event_in_place(state, e);
}

/// Memory-level replay; throws on any divergence. Returns the final state
/// (memory and sections).
inline GlobalState replay(const Run& run) {
  for (const auto& pi : run.assignments)
    if (pi.size() != run.registers()) throw Error(ErrorKind::InvalidArgument, "naming assignment size differs from m");
  GlobalState s = start_state(run);
  for (const Event& e : run.events) replay_event(run, s, e);
  return s;
}

/// Position at which `p` last left its remainder section, or nullopt when p
/// is in its remainder at the end of the run.
inline std::optional<std::size_t> left_remainder_at(const Run& z, ProcessId p) {
  Section sect = Section::Remainder;
  std::optional<std::size_t> start;
  for (std::size_t i = 0; i < z.events.size(); ++i) {
    const Event& e = z.events[i];
    if (!(e.actor == p)) continue;
    Section next = next_section(sect, e.kind);
    if (sect == Section::Remainder && next != Section::Remainder) start = i;
    if (next == Section::Remainder) start.reset();
    sect = next;
  }
  return start;
}

/// e2 overwrites e1: both writes to the same register, e2 later.
inline bool is_overwritten(const Run& z, std::size_t e1, std::size_t e2) {
  if (e1 >= z.events.size() || e2 >= z.events.size())
    throw Error(ErrorKind::InvalidArgument, "event position out of range");
  const Event& a = z.events[e1];
  const Event& b = z.events[e2];
  return a.is_write() && b.is_write() && a.physical == b.physical && e2 > e1;
}

/// Whether the write at `pos` is overwritten before any process other than
/// its writer reads the register.
inline bool write_is_hidden(const Run& z, std::size_t pos) {
  const Event& w = z.events[pos];
  for (std::size_t i = pos + 1; i < z.events.size(); ++i) {
    const Event& e = z.events[i];
    if (e.physical != w.physical || !e.is_access()) continue;
    if (e.is_write()) return true;
    if (!(e.actor == w.actor)) return false;
  }
  return false;
}

/// p is hidden in z when every event p took since it last left its remainder
/// is a read, a section change, or a write that is overwritten before any
/// other process reads it.
inline bool is_hidden(const Run& z, ProcessId p) {
  auto start = left_remainder_at(z, p);
  if (!start) return true;
  for (std::size_t i = *start; i < z.events.size(); ++i) {
    const Event& e = z.events[i];
    if (!(e.actor == p) || !e.is_write()) continue;
    if (!write_is_hidden(z, i)) return false;
  }
  return true;
}

inline std::vector<Event> events_of(const Run& run, ProcessId p) {
  std::vector<Event> out;
  for (const Event& e : run.events)
    if (e.actor == p) out.push_back(e);
  return out;
}

/// x looks like y to p: same subsequence of p-events, same final registers.
inline bool looks_like(const Run& x, const Run& y, ProcessId p) {
  GlobalState fx = replay(x);
  GlobalState fy = replay(y);
  return events_of(x, p) == events_of(y, p) && fx.memory == fy.memory;
}

/// Drops every event of p from position `from` on.
inline Run erase_process(const Run& z, ProcessId p, std::size_t from = 0) {
  Run out = z;
  out.events.clear();
  for (std::size_t i = 0; i < z.events.size(); ++i)
    if (i < from || !(z.events[i].actor == p)) out.events.push_back(z.events[i]);
  return out;
}

/// y = x[p, r_i <-> r_j]: p's accesses through logical i and j are exchanged
/// by swapping its naming assignment at (i, j). Both physical registers must
/// be unwritten in x and hold the same initial value.
inline Run swap_run(const Run& x, ProcessId p, int i, int j) {
  const int who = x.index_of(p);
  const NamingAssignment& pi = x.assignments[who];
  NamingAssignment swapped = swap_naming(pi, i, j);
  const int ri = pi(i);
  const int rj = pi(j);
  for (const Event& e : x.events)
    if (e.is_write() && (e.physical == ri || e.physical == rj))
      throw Error(ErrorKind::SwapPrecondition, "register r" + std::to_string(e.physical) + " is written in the run");
  if (!(x.initial[ri] == x.initial[rj]))
    throw Error(ErrorKind::SwapPrecondition, "registers start with different values");

  Run y = x;
  y.assignments[who] = swapped;
  for (Event& e : y.events)
    if (e.actor == p && e.is_access() && (e.logical == i || e.logical == j)) e.physical = swapped(e.logical);
  replay(y);
  return y;
}

/// y;(z - x), valid when x looks like y to every process in P, z extends x
/// and only P acts in (z - x).
inline Run extend_run(const Run& y, const Run& x, const Run& z, std::span<const ProcessId> P) {
  if (!is_prefix(x, z)) throw Error(ErrorKind::ExtensionPrecondition, "z does not extend x");
  std::vector<Event> tail = suffix(z, x);
  auto in_P = [&](ProcessId id) { return std::find(P.begin(), P.end(), id) != P.end(); };
  for (const Event& e : tail)
    if (!in_P(e.actor))
      throw Error(ErrorKind::ExtensionPrecondition,
                  "extension involves id:" + std::to_string(e.actor.token()) + " outside P");
  for (ProcessId p : P) {
    if (!y.involves(p) || !(y.assignment(p) == x.assignment(p)))
      throw Error(ErrorKind::ExtensionPrecondition, "naming assignment differs between x and y");
    if (!looks_like(x, y, p))
      throw Error(ErrorKind::ExtensionPrecondition, "x does not look like y to id:" + std::to_string(p.token()));
  }
  Run out = y.then(tail);
  try {
    replay(out);
  } catch (const Error& err) {
    throw Error(ErrorKind::ConstructionInvariant, std::string("extension failed to replay: ") + err.what());
  }
  return out;
}

}  // namespace anonmutex
