#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "anonmutex/error.hpp"
#include "anonmutex/program.hpp"
#include "anonmutex/values.hpp"

namespace anonmutex {

/// The m anonymous registers, indexed physically 1..m.
class MemoryState {
 public:
  MemoryState() = default;

  explicit MemoryState(std::vector<RegisterValue> values) : values_(std::move(values)) {
    if (values_.empty()) throw Error(ErrorKind::InvalidConfiguration, "at least one register is required");
  }

  int size() const noexcept { return static_cast<int>(values_.size()); }

  const RegisterValue& operator[](int physical) const {
    check(physical);
    return values_[physical - 1];
  }
  void set(int physical, RegisterValue v) {
    check(physical);
    values_[physical - 1] = v;
  }

  const std::vector<RegisterValue>& values() const noexcept { return values_; }

  friend bool operator==(const MemoryState&, const MemoryState&) = default;

 private:
  void check(int physical) const {
    if (physical < 1 || physical > size())
      throw Error(ErrorKind::InvalidEvent, "register index " + std::to_string(physical) + " outside 1.." +
                                               std::to_string(size()));
  }

  std::vector<RegisterValue> values_;
};

/// All registers start with the same value.
inline MemoryState new_memory(int m) {
  if (m < 1) throw Error(ErrorKind::InvalidConfiguration, "register count must be at least 1");
  return MemoryState(std::vector<RegisterValue>(m, RegisterValue::free()));
}

enum class Section : std::uint8_t { Remainder, Entry, Critical, Exit };

inline const char* to_string(Section s) {
  switch (s) {
    case Section::Remainder: return "remainder";
    case Section::Entry: return "entry";
    case Section::Critical: return "critical";
    case Section::Exit: return "exit";
  }
  return "?";
}

enum class EventKind : std::uint8_t { Read, Write, EnterCS, ExitCS, EnterRemainder };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Read: return "read";
    case EventKind::Write: return "write";
    case EventKind::EnterCS: return "enter-cs";
    case EventKind::ExitCS: return "exit-cs";
    case EventKind::EnterRemainder: return "enter-remainder";
  }
  return "?";
}

/// One atomic step. Read/Write carry both the actor's logical index and the
/// physical register it resolved to; Read.value is the value returned.
struct Event {
  ProcessId actor;
  EventKind kind = EventKind::Read;
  int logical = 0;
  int physical = 0;
  RegisterValue value;

  bool is_access() const noexcept { return kind == EventKind::Read || kind == EventKind::Write; }
  bool is_write() const noexcept { return kind == EventKind::Write; }
  bool is_read() const noexcept { return kind == EventKind::Read; }

  friend bool operator==(const Event&, const Event&) = default;
};

/// Memory, per-process local state and section. Processes are kept in a
/// fixed order; `locals` may be empty when only memory-level replay is done.
struct GlobalState {
  MemoryState memory;
  std::vector<ProcessId> procs;
  std::vector<LocalState> locals;
  std::vector<Section> sections;

  int index_of(ProcessId id) const {
    auto it = std::find(procs.begin(), procs.end(), id);
    if (it == procs.end())
      throw Error(ErrorKind::InvalidEvent, "unknown process id:" + std::to_string(id.token()));
    return static_cast<int>(it - procs.begin());
  }

  Section section(ProcessId id) const { return sections[index_of(id)]; }

  bool quiescent() const {
    return std::all_of(sections.begin(), sections.end(), [](Section s) { return s == Section::Remainder; });
  }

  int in_critical() const {
    return static_cast<int>(std::count(sections.begin(), sections.end(), Section::Critical));
  }

  friend bool operator==(const GlobalState&, const GlobalState&) = default;
};

/// Section after `actor` performs an event of `kind` while in `current`.
inline Section next_section(Section current, EventKind kind) {
  switch (kind) {
    case EventKind::Read:
    case EventKind::Write: return current == Section::Remainder ? Section::Entry : current;
    case EventKind::EnterCS: return Section::Critical;
    case EventKind::ExitCS: return Section::Exit;
    case EventKind::EnterRemainder: return Section::Remainder;
  }
  return current;
}

/// Memory/section effect of one event. Local states are not touched.
inline void apply_event_in_place(GlobalState& state, const Event& e) {
  const int who = state.index_of(e.actor);
  switch (e.kind) {
    case EventKind::Read:
      if (!(state.memory[e.physical] == e.value))
        throw Error(ErrorKind::ReplayDivergence,
                    "read of r" + std::to_string(e.physical) + " recorded " + to_token(e.value) + " but register holds " +
                        to_token(state.memory[e.physical]));
      break;
    case EventKind::Write: state.memory.set(e.physical, e.value); break;
    default: break;
  }
  state.sections[who] = next_section(state.sections[who], e.kind);
}

inline GlobalState apply_event(GlobalState state, const Event& e) {
  apply_event_in_place(state, e);
  return state;
}

}  // namespace anonmutex
