#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "anonmutex/error.hpp"
#include "anonmutex/values.hpp"

namespace anonmutex {

/// Local variables of a process. The field set is the one the two-process
/// algorithm declares; other programs reuse the same slots.
struct LocalState {
  ProcessId self;
  int location = 0;
  std::vector<RegisterValue> view;  // myview[1..m], stored 0-based
  int counter = 0;
  int j = 0;
  int k = 0;
  bool go = false;

  friend bool operator==(const LocalState&, const LocalState&) = default;
};

enum class ActionKind : std::uint8_t { Read, Write, EnterCS, ExitCS, EnterRemainder, StayRemainder };

inline const char* to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Read: return "read";
    case ActionKind::Write: return "write";
    case ActionKind::EnterCS: return "enter-cs";
    case ActionKind::ExitCS: return "exit-cs";
    case ActionKind::EnterRemainder: return "enter-remainder";
    case ActionKind::StayRemainder: return "stay-remainder";
  }
  return "?";
}

struct Action {
  ActionKind kind = ActionKind::StayRemainder;
  int logical = 0;      // Read / Write
  RegisterValue value;  // Write

  static Action read(int logical) { return {ActionKind::Read, logical, {}}; }
  static Action write(int logical, RegisterValue v) { return {ActionKind::Write, logical, v}; }
  static Action enter_cs() { return {ActionKind::EnterCS, 0, {}}; }
  static Action exit_cs() { return {ActionKind::ExitCS, 0, {}}; }
  static Action enter_remainder() { return {ActionKind::EnterRemainder, 0, {}}; }
  static Action stay() { return {ActionKind::StayRemainder, 0, {}}; }

  bool is_access() const noexcept { return kind == ActionKind::Read || kind == ActionKind::Write; }

  friend bool operator==(const Action&, const Action&) = default;
};

/// A deterministic, symmetric step machine. Every program instance is
/// immutable after construction; all mutable data lives in LocalState.
///
/// The machine is split in two halves so a scheduler can inspect what a
/// process is about to do before letting it do it:
///   pending(local)          the next action, a pure function of local
///   advance(local, result)  consume the outcome of that action
/// A process in its remainder section reports StayRemainder until the
/// scheduler calls begin_entry.
class ProcessProgram {
 public:
  virtual ~ProcessProgram() = default;

  virtual std::string name() const = 0;
  virtual int registers() const = 0;
  virtual LocalState initial(ProcessId self) const = 0;
  virtual Action pending(const LocalState& local) const = 0;
  virtual void begin_entry(LocalState& local) const = 0;
  virtual void advance(LocalState& local, std::optional<RegisterValue> read_result) const = 0;

  /// Human-readable name of a program location, for traces.
  virtual std::string location_name(int location) const { return std::to_string(location); }
};

using ProgramPtr = std::shared_ptr<const ProcessProgram>;

/// Completes the pending action of `local` with `read_result` and returns the
/// successor state together with its pending action.
inline std::pair<LocalState, Action> step(const ProcessProgram& program, LocalState local,
                                          std::optional<RegisterValue> read_result) {
  const Action before = program.pending(local);
  if ((before.kind == ActionKind::Read) != read_result.has_value())
    throw Error(ErrorKind::Protocol, std::string("read result ") + (read_result ? "given" : "missing") +
                                         " for pending " + to_string(before.kind));
  program.advance(local, read_result);
  Action next = program.pending(local);
  return {std::move(local), next};
}

}  // namespace anonmutex
