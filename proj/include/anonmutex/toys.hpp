#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "anonmutex/error.hpp"
#include "anonmutex/program.hpp"

namespace anonmutex {

/// Never leaves its remainder section.
class FrozenProgram final : public ProcessProgram {
 public:
  explicit FrozenProgram(int m) : m_(m) {}
  std::string name() const override { return "toy-frozen"; }
  int registers() const override { return m_; }
  LocalState initial(ProcessId self) const override {
    LocalState s;
    s.self = self;
    return s;
  }
  void begin_entry(LocalState&) const override {}
  Action pending(const LocalState&) const override { return Action::stay(); }
  void advance(LocalState&, std::optional<RegisterValue>) const override {}

 private:
  int m_;
};

/// Enters its entry section and reads register 1 forever.
class SpinReader final : public ProcessProgram {
 public:
  explicit SpinReader(int m) : m_(m) {}
  std::string name() const override { return "toy-spin"; }
  int registers() const override { return m_; }
  LocalState initial(ProcessId self) const override {
    LocalState s;
    s.self = self;
    return s;
  }
  void begin_entry(LocalState& s) const override { s.location = 1; }
  Action pending(const LocalState& s) const override { return s.location == 0 ? Action::stay() : Action::read(1); }
  void advance(LocalState&, std::optional<RegisterValue>) const override {}

 private:
  int m_;
};

/// Writes its id into register 1, passes through its critical section and
/// never clears the register.
class LeakyWriter final : public ProcessProgram {
 public:
  explicit LeakyWriter(int m) : m_(m) {}
  std::string name() const override { return "toy-leaky"; }
  int registers() const override { return m_; }
  LocalState initial(ProcessId self) const override {
    LocalState s;
    s.self = self;
    return s;
  }
  void begin_entry(LocalState& s) const override { s.location = 1; }
  Action pending(const LocalState& s) const override {
    switch (s.location) {
      case 1: return Action::write(1, RegisterValue::owned(s.self));
      case 2: return Action::enter_cs();
      case 3: return Action::exit_cs();
      case 4: return Action::enter_remainder();
      default: return Action::stay();
    }
  }
  void advance(LocalState& s, std::optional<RegisterValue>) const override {
    if (s.location == 0) return;
    s.location = s.location == 4 ? 0 : s.location + 1;
  }

 private:
  int m_;
};

/// Majority-claim program used to exercise the adversaries.
///
/// A process claims every register that holds no identifier, in a fixed
/// logical order, until no unclaimed register is left. Holding a strict
/// majority it enters, then refills all m registers with the fill value and
/// leaves. Otherwise it waits until no identifier is visible and enters.
/// With `flip` the fill value alternates between 0 and "waiting" on every
/// winning passage, so the program has two quiescent memories.
class ClaimProgram final : public ProcessProgram {
 public:
  enum class Order { Ascending, MiddleFirst };

  ClaimProgram(int m, Order order, bool flip) : m_(m), order_(order), flip_(flip) {
    if (m < 1) throw Error(ErrorKind::InvalidConfiguration, "register count must be at least 1");
    for (int k = 1; k <= m; ++k) sequence_.push_back(k);
    if (order == Order::MiddleFirst) {
      const int mid = (m + 1) / 2;
      sequence_.erase(sequence_.begin() + (mid - 1));
      sequence_.insert(sequence_.begin(), mid);
    }
  }

  std::string name() const override {
    if (flip_) return "toy-flip";
    return order_ == Order::MiddleFirst ? "toy-claim-mid" : "toy-claim";
  }
  int registers() const override { return m_; }

  LocalState initial(ProcessId self) const override {
    LocalState s;
    s.self = self;
    s.view.assign(m_, RegisterValue::free());
    return s;
  }

  void begin_entry(LocalState& s) const override {
    s.k = 1;
    s.location = Test;
  }

  Action pending(const LocalState& s) const override {
    switch (s.location) {
      case Idle: return Action::stay();
      case Test: return Action::read(sequence_[s.k - 1]);
      case Take: return Action::write(sequence_[s.k - 1], RegisterValue::owned(s.self));
      case Scan:
      case Wait: return Action::read(s.j);
      case EnterWinner:
      case EnterLoser: return Action::enter_cs();
      case CriticalWinner:
      case CriticalLoser: return Action::exit_cs();
      case Refill: return Action::write(s.j, fill(s));
      case Reset: return Action::enter_remainder();
      default: break;
    }
    throw Error(ErrorKind::Protocol, "undefined toy location");
  }

  void advance(LocalState& s, std::optional<RegisterValue> read) const override {
    switch (s.location) {
      case Idle: return;
      case Test:
        if (!read->is_id()) {
          if (s.counter == 0) {
            s.counter = 1;
            s.go = read->is_waiting();
          }
          s.location = Take;
        } else {
          next_claim(s);
        }
        return;
      case Take: next_claim(s); return;
      case Scan: {
        if (!record(s, *read)) return;
        const auto unclaimed = std::count_if(s.view.begin(), s.view.end(), [](auto& v) { return !v.is_id(); });
        const auto own = std::count_if(s.view.begin(), s.view.end(), [&](auto& v) { return v.is(s.self); });
        if (unclaimed > 0) {
          begin_entry(s);
        } else if (2 * own > m_) {
          s.location = EnterWinner;
        } else {
          s.j = 1;
          s.location = Wait;
        }
        return;
      }
      case Wait:
        if (!record(s, *read)) return;
        if (std::none_of(s.view.begin(), s.view.end(), [](auto& v) { return v.is_id(); })) {
          s.location = EnterLoser;
        } else {
          s.j = 1;
        }
        return;
      case EnterWinner: s.location = CriticalWinner; return;
      case EnterLoser: s.location = CriticalLoser; return;
      case CriticalWinner:
        s.j = 1;
        s.location = Refill;
        return;
      case CriticalLoser: s.location = Reset; return;
      case Refill:
        if (s.j < m_) {
          ++s.j;
        } else {
          s.j = 0;
          s.location = Reset;
        }
        return;
      case Reset: s = initial(s.self); return;
      default: break;
    }
    throw Error(ErrorKind::Protocol, "undefined toy location");
  }

 private:
  enum Loc : int { Idle, Test, Take, Scan, Wait, EnterWinner, EnterLoser, CriticalWinner, CriticalLoser, Refill, Reset };

  RegisterValue fill(const LocalState& s) const {
    const bool base_waiting = s.go;
    const bool fill_waiting = flip_ ? !base_waiting : base_waiting;
    return fill_waiting ? RegisterValue::waiting() : RegisterValue::free();
  }

  void next_claim(LocalState& s) const {
    if (s.k < m_) {
      ++s.k;
      s.location = Test;
    } else {
      s.k = 0;
      s.j = 1;
      s.location = Scan;
    }
  }

  bool record(LocalState& s, const RegisterValue& v) const {
    s.view[s.j - 1] = v;
    if (s.j < m_) {
      ++s.j;
      return false;
    }
    s.j = 0;
    return true;
  }

  int m_;
  Order order_;
  bool flip_;
  std::vector<int> sequence_;
};

}  // namespace anonmutex
