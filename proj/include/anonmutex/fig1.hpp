#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <string>

#include "anonmutex/error.hpp"
#include "anonmutex/program.hpp"

namespace anonmutex {

enum class Fig1Variant { Standard, NoPriorityGate, OneReservedRegister };

inline const char* to_string(Fig1Variant v) {
  switch (v) {
    case Fig1Variant::Standard: return "standard";
    case Fig1Variant::NoPriorityGate: return "no-gate";
    case Fig1Variant::OneReservedRegister: return "one-reserved";
  }
  return "?";
}

struct Fig1Config {
  int m = 7;
  Fig1Variant variant = Fig1Variant::Standard;
  bool allow_invalid_m = false;

  int ownership_target() const noexcept { return m - 2; }
  int loser_threshold() const noexcept { return (m + 1) / 2; }
  int reserved() const noexcept { return variant == Fig1Variant::OneReservedRegister ? 1 : 2; }
};

/// Two-process symmetric memoryless starvation-free mutual exclusion over m
/// anonymous registers (m odd, m >= 7), one shared access per step.
///
/// A process owns a register when the register holds its identifier. It
/// enters its critical section either by owning m-2 registers, or, after
/// losing (owning fewer than ceil(m/2) after a full pass), by parking
/// "waiting" in at most two of its registers until every other register is
/// free. An entering process first owns one register and then yields to a
/// process that is already waiting.
///
/// Reading notes, all deliberate:
///  * the claim loop tests and writes p.i[k] (the loop index), not p.i[j];
///  * the zero-entry search wraps from m back to 1;
///  * the line-5 release is a read followed by a conditional write;
///  * every m-register scan and every exit sweep costs one event per
///    register.
class Fig1Program final : public ProcessProgram {
 public:
  enum Loc : int {
    Idle = 0,          // remainder
    ScanForZero,       // 1
    OwnOne,            // 2
    GateScan,          // 3
    GateRecheck,       // 5 (read)
    GateRelease,       // 5 (write)
    GateWait,          // 6-8
    TestFree,          // 12
    ClaimScan,         // 13
    Claim,             // 15
    PassScan,          // 17
    LoserTest,         // 20
    LoserRelease,      // 21
    SignalWaiting,     // 22
    LoserWait,         // 24-26
    EnterCritical,     // 30
    Critical,          // 30
    ExitWaiterTest,    // 31 (read)
    ExitWaiterRelease, // 31 (write)
    ExitWinnerTest,    // 32 (read)
    ExitWinnerRelease, // 32 (write)
    Reset,             // 34
    LocCount
  };

  explicit Fig1Program(Fig1Config config) : cfg_(config) {
    if (cfg_.m < 3) throw Error(ErrorKind::InvalidConfiguration, "the algorithm needs m >= 3");
    if (!cfg_.allow_invalid_m && (cfg_.m % 2 == 0 || cfg_.m < 7))
      throw Error(ErrorKind::InvalidConfiguration,
                  "m must be odd and at least 7 (m=" + std::to_string(cfg_.m) + "); pass allow_invalid_m to override");
  }

  const Fig1Config& config() const noexcept { return cfg_; }

  std::string name() const override {
    switch (cfg_.variant) {
      case Fig1Variant::Standard: return "fig1";
      case Fig1Variant::NoPriorityGate: return "fig1-no-gate";
      case Fig1Variant::OneReservedRegister: return "fig1-one-reserved";
    }
    return "fig1";
  }

  int registers() const override { return cfg_.m; }

  LocalState initial(ProcessId self) const override {
    LocalState s;
    s.self = self;
    s.location = Idle;
    s.view.assign(cfg_.m, RegisterValue::free());
    return s;
  }

  void begin_entry(LocalState& s) const override {
    if (s.location != Idle) throw Error(ErrorKind::Protocol, "begin-entry outside the remainder section");
    if (cfg_.variant == Fig1Variant::NoPriorityGate) {
      start_pass(s);
    } else {
      s.location = ScanForZero;
    }
  }

  Action pending(const LocalState& s) const override {
    const RegisterValue me = RegisterValue::owned(s.self);
    switch (s.location) {
      case Idle: return Action::stay();
      case ScanForZero: return Action::read(wrap_next(s.counter));
      case OwnOne: return Action::write(s.counter, me);
      case GateScan:
      case GateWait:
      case ClaimScan:
      case PassScan:
      case LoserTest:
      case LoserWait:
      case ExitWaiterTest:
      case ExitWinnerTest: return Action::read(s.j);
      case GateRecheck: return Action::read(s.counter);
      case GateRelease: return Action::write(s.counter, RegisterValue::free());
      case TestFree: return Action::read(s.k);
      case Claim: return Action::write(s.k, me);
      case LoserRelease:
      case ExitWaiterRelease:
      case ExitWinnerRelease: return Action::write(s.j, RegisterValue::free());
      case SignalWaiting: return Action::write(s.j, RegisterValue::waiting());
      case EnterCritical: return Action::enter_cs();
      case Critical: return Action::exit_cs();
      case Reset: return Action::enter_remainder();
      default: break;
    }
    throw Error(ErrorKind::Protocol, "undefined program location " + std::to_string(s.location));
  }

  void advance(LocalState& s, std::optional<RegisterValue> read) const override {
    auto value = [&]() -> const RegisterValue& {
      if (!read) throw Error(ErrorKind::Protocol, "read result missing");
      return *read;
    };
    if (s.location != Idle && pending(s).kind != ActionKind::Read && read)
      throw Error(ErrorKind::Protocol, "read result given for a non-read action");

    switch (s.location) {
      case Idle: return;

      case ScanForZero:
        s.counter = wrap_next(s.counter);
        if (value().is_free()) s.location = OwnOne;
        return;

      case OwnOne: start_scan(s, GateScan); return;

      case GateScan:
        if (!record(s, value())) return;
        if (any_waiting(s)) {
          s.location = GateRecheck;
        } else {
          start_pass(s);
        }
        return;

      case GateRecheck:
        if (value().is(s.self)) {
          s.location = GateRelease;
        } else {
          start_scan(s, GateWait);
        }
        return;

      case GateRelease: start_scan(s, GateWait); return;

      case GateWait:
        if (!record(s, value())) return;
        if (any_waiting(s)) {
          start_scan(s, GateWait);
        } else {
          start_pass(s);
        }
        return;

      case TestFree:
        if (value().is_free()) {
          start_scan(s, ClaimScan);
        } else {
          next_claim(s);
        }
        return;

      case ClaimScan:
        if (!record(s, value())) return;
        if (count_own(s) < cfg_.ownership_target()) {
          s.location = Claim;
        } else {
          next_claim(s);
        }
        return;

      case Claim: next_claim(s); return;

      case PassScan:
        if (!record(s, value())) return;
        if (count_own(s) < cfg_.loser_threshold()) {
          s.counter = 0;
          s.j = 1;
          s.location = LoserTest;
        } else if (count_own(s) >= cfg_.ownership_target()) {
          s.location = EnterCritical;
        } else {
          start_pass(s);
        }
        return;

      case LoserTest:
        if (value().is(s.self)) {
          s.location = s.counter == cfg_.reserved() ? LoserRelease : SignalWaiting;
        } else {
          next_loser(s);
        }
        return;

      case LoserRelease: next_loser(s); return;

      case SignalWaiting:
        ++s.counter;
        next_loser(s);
        return;

      case LoserWait:
        if (!record(s, value())) return;
        if (std::all_of(s.view.begin(), s.view.end(), [](const RegisterValue& v) { return !v.is_id(); })) {
          s.go = true;
          s.location = EnterCritical;
        } else {
          start_scan(s, LoserWait);
        }
        return;

      case EnterCritical: s.location = Critical; return;

      case Critical:
        s.j = 1;
        s.location = s.go ? ExitWaiterTest : ExitWinnerTest;
        return;

      case ExitWaiterTest:
        if (value().is_waiting()) {
          s.location = ExitWaiterRelease;
        } else {
          next_exit(s, ExitWaiterTest);
        }
        return;

      case ExitWaiterRelease: next_exit(s, ExitWaiterTest); return;

      case ExitWinnerTest:
        if (value().is(s.self)) {
          s.location = ExitWinnerRelease;
        } else {
          next_exit(s, ExitWinnerTest);
        }
        return;

      case ExitWinnerRelease: next_exit(s, ExitWinnerTest); return;

      case Reset: s = initial(s.self); return;

      default: break;
    }
    throw Error(ErrorKind::Protocol, "undefined program location " + std::to_string(s.location));
  }

  std::string location_name(int location) const override { return phase_name(location); }

  static std::string phase_name(int location) {
    switch (location) {
      case Idle: return "remainder";
      case ScanForZero: return "scan-for-zero";
      case OwnOne: return "own-one";
      case GateScan: return "gate-scan";
      case GateRecheck: return "gate-recheck-owned";
      case GateRelease: return "gate-release-owned";
      case GateWait: return "gate-wait-no-waiting";
      case TestFree: return "test-free";
      case ClaimScan: return "claim-scan";
      case Claim: return "claim";
      case PassScan: return "pass-scan";
      case LoserTest: return "loser-test-owned";
      case LoserRelease: return "loser-release";
      case SignalWaiting: return "signal-waiting";
      case LoserWait: return "loser-wait";
      case EnterCritical: return "enter-cs";
      case Critical: return "critical";
      case ExitWaiterTest: return "release-after-cs-waiter-test";
      case ExitWaiterRelease: return "release-after-cs-waiter";
      case ExitWinnerTest: return "release-after-cs-winner-test";
      case ExitWinnerRelease: return "release-after-cs-winner";
      case Reset: return "reset-locals";
      default: break;
    }
    return "?";
  }

  /// Source line of each location in the published listing.
  static int line_of(int location) {
    static constexpr int lines[LocCount] = {34, 1, 2, 3, 5, 5, 7, 12, 13, 15, 17,
                                            20, 21, 22, 25, 30, 30, 31, 31, 32, 32, 34};
    if (location < 0 || location >= LocCount) throw Error(ErrorKind::InvalidArgument, "unknown location");
    return lines[location];
  }

 private:
  int wrap_next(int counter) const noexcept { return counter % cfg_.m + 1; }

  static void start_scan(LocalState& s, int loc) {
    s.j = 1;
    s.location = loc;
  }

  void start_pass(LocalState& s) const {
    s.k = 1;
    s.j = 0;
    s.location = TestFree;
  }

  /// Stores one scanned value; true when the scan is complete.
  bool record(LocalState& s, const RegisterValue& v) const {
    s.view[s.j - 1] = v;
    if (s.j < cfg_.m) {
      ++s.j;
      return false;
    }
    s.j = 0;
    return true;
  }

  void next_claim(LocalState& s) const {
    if (s.k < cfg_.m) {
      ++s.k;
      s.location = TestFree;
    } else {
      s.k = 0;
      start_scan(s, PassScan);
    }
  }

  void next_loser(LocalState& s) const {
    if (s.j < cfg_.m) {
      ++s.j;
      s.location = LoserTest;
    } else {
      start_scan(s, LoserWait);
    }
  }

  void next_exit(LocalState& s, int test_loc) const {
    if (s.j < cfg_.m) {
      ++s.j;
      s.location = test_loc;
    } else {
      s.j = 0;
      s.location = Reset;
    }
  }

  static bool any_waiting(const LocalState& s) {
    return std::any_of(s.view.begin(), s.view.end(), [](const RegisterValue& v) { return v.is_waiting(); });
  }

  static int count_own(const LocalState& s) {
    return static_cast<int>(
        std::count_if(s.view.begin(), s.view.end(), [&](const RegisterValue& v) { return v.is(s.self); }));
  }

  Fig1Config cfg_;
};

inline std::shared_ptr<const Fig1Program> build_program(const Fig1Config& config) {
  return std::make_shared<const Fig1Program>(config);
}

/// Phase name -> listing line for every location the program can occupy.
inline std::map<std::string, int> line_map(const Fig1Program&) {
  std::map<std::string, int> out;
  for (int loc = 0; loc < Fig1Program::LocCount; ++loc) out[Fig1Program::phase_name(loc)] = Fig1Program::line_of(loc);
  return out;
}

}  // namespace anonmutex
