#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "anonmutex/adversary/pairing.hpp"
#include "anonmutex/checker/properties.hpp"
#include "anonmutex/symmetry.hpp"
#include "anonmutex/system.hpp"

namespace anonmutex {

struct SymmetricRunResult {
  Run run;
  NamingAssignment pi_p;
  NamingAssignment pi_q;
  /// Registers written during the symmetric phase, through the final
  /// self-pair write.
  std::set<int> writes_p;
  std::set<int> writes_q;
  /// Registers written anywhere in the run.
  std::set<int> all_writes_p;
  std::set<int> all_writes_q;
  std::vector<bool> checkpoints;  // one per lock-step
  std::size_t symmetric_length = 0;
  int case4_swaps = 0;
  int cs_entries_p = 0;
  int cs_entries_q = 0;
  int cs_exits_p = 0;
  int cs_exits_q = 0;
  GlobalState final_state;
};

namespace detail {

/// Two processes running the same program in lock-steps from a quiescent
/// memory, starting from the identity / reverse assignments.
class Lockstep {
 public:
  enum class Stop { BothWrite, BothEnterCS, Cap };

  Lockstep(ProgramPtr program, const MemoryState& sigma, ProcessId p, ProcessId q, std::size_t cap)
      : program_(std::move(program)), sigma_(sigma), p_(p), q_(q), cap_(cap) {
    const int m = sigma.size();
    if (program_->registers() != m) throw Error(ErrorKind::InvalidConfiguration, "program built for a different m");
    reset(NamingAssignment::identity(m), NamingAssignment::reverse(m));
    run_ = sys_->empty_run(sigma_);
    if (!is_symmetric_state(state_, p_, q_, pi_p_, pi_q_))
      throw Error(ErrorKind::SymmetryViolation, "starting state is not symmetric");
  }

  const System& system() const { return *sys_; }
  const GlobalState& state() const { return state_; }
  const Run& run() const { return run_; }
  const NamingAssignment& pi_p() const { return pi_p_; }
  const NamingAssignment& pi_q() const { return pi_q_; }
  const std::set<int>& written() const { return written_; }
  std::vector<bool>& log() { return log_; }
  std::size_t used() const { return used_; }
  bool symmetric() const { return is_symmetric_state(state_, p_, q_, pi_p_, pi_q_); }

  /// The common next action of both processes.
  Action peek() const {
    const Action ap = sys_->next_action(state_, 0);
    const Action aq = sys_->next_action(state_, 1);
    if (ap.kind != aq.kind || (ap.is_access() && ap.logical != aq.logical))
      throw Error(ErrorKind::SymmetryViolation, std::string("symmetric processes disagree: ") + to_string(ap.kind) +
                                                    " vs " + to_string(aq.kind));
    return ap;
  }

  /// Lock-steps both processes until their next actions are writes (or
  /// critical-section entries). Each lock-step appends a checkpoint.
  Stop advance() {
    while (true) {
      const Action a = peek();
      if (a.kind == ActionKind::Write) return Stop::BothWrite;
      if (a.kind == ActionKind::EnterCS) return Stop::BothEnterCS;
      if (used_ >= cap_) return Stop::Cap;
      lockstep();
      if (!log_.back()) throw Error(ErrorKind::SymmetryViolation, "symmetry lost after a lock-step of reads");
    }
  }

  /// One step by p, then one by q; records the checkpoint.
  void lockstep() {
    ++used_;
    for (int who : {0, 1}) {
      const Event e = sys_->execute(state_, who);
      if (e.is_write()) written_.insert(e.physical);
      run_.events.push_back(e);
    }
    log_.push_back(symmetric());
  }

  /// Both processes' pending writes target logical index l. Swaps l with k
  /// in both naming assignments and rebuilds the run under the new ones.
  void retarget(int l, int k) {
    Run z = swap_run(run_, p_, l, k);
    z = swap_run(z, q_, l, k);
    reset(z.assignment(p_), z.assignment(q_));
    state_ = sys_->replay(z);
    run_ = std::move(z);
  }

  std::size_t remaining() const { return cap_ > used_ ? cap_ - used_ : 0; }
  void charge() { ++used_; }

 private:
  void reset(NamingAssignment pi_p, NamingAssignment pi_q) {
    pi_p_ = std::move(pi_p);
    pi_q_ = std::move(pi_q);
    sys_.emplace(sigma_.size(), std::vector<System::Member>{{p_, program_, pi_p_}, {q_, program_, pi_q_}});
    if (run_.events.empty()) state_ = sys_->initial_state(sigma_);
  }

  ProgramPtr program_;
  MemoryState sigma_;
  ProcessId p_, q_;
  std::size_t cap_;
  std::optional<System> sys_;
  NamingAssignment pi_p_, pi_q_;
  GlobalState state_;
  Run run_;
  std::set<int> written_;
  std::vector<bool> log_;
  std::size_t used_ = 0;
};

inline void tally(SymmetricRunResult& r, ProcessId p) {
  std::set<int> a, b;
  for (const Event& e : r.run.events) {
    const bool is_p = e.actor == p;
    if (e.is_write()) (is_p ? a : b).insert(e.physical);
    if (e.kind == EventKind::EnterCS) ++(is_p ? r.cs_entries_p : r.cs_entries_q);
    if (e.kind == EventKind::ExitCS) ++(is_p ? r.cs_exits_p : r.cs_exits_q);
  }
  r.all_writes_p = a;
  r.all_writes_q = b;
}

}  // namespace detail

/// Builds a symmetric lock-step run of two copies of `program` from the
/// symmetric quiescent memory `sigma` until every register has been
/// written, renaming registers on the fly whenever both processes are about
/// to write the same fresh register too early. Once the last register is
/// written by both, each process is run alone until it blocks (its own
/// state repeats), alternating, until both have passed through their
/// critical sections and are back in their remainder sections.
///
/// `step_cap` bounds lock-steps plus completion steps.
inline SymmetricRunResult lockstep_construct(ProgramPtr program, const MemoryState& sigma, std::size_t step_cap,
                                             ProcessId p = ProcessId(1), ProcessId q = ProcessId(2)) {
  const int m = sigma.size();
  if (m % 2 == 0) throw Error(ErrorKind::InvalidArgument, "the lock-step construction needs an odd m");
  if (step_cap == 0) throw Error(ErrorKind::InvalidArgument, "step cap must be positive");
  detail::Lockstep ls(std::move(program), sigma, p, q, step_cap);
  SymmetricRunResult out;

  while (true) {
    const auto stop = ls.advance();
    if (stop == detail::Lockstep::Stop::Cap) throw Error(ErrorKind::CapExceeded, "step cap reached in the symmetric phase");
    if (stop == detail::Lockstep::Stop::BothEnterCS)
      throw Error(ErrorKind::SymmetryViolation, "both processes reach their critical sections in a symmetric run");
    const int l = ls.system().next_action(ls.state(), 0).logical;
    const int ri = ls.pi_p()(l);
    const int rj = ls.pi_q()(l);
    if (ri != rj) {  // case 1
      if (ls.remaining() == 0) throw Error(ErrorKind::CapExceeded, "step cap reached in the symmetric phase");
      ls.lockstep();
      if (!ls.log().back()) throw Error(ErrorKind::SymmetryViolation, "symmetry lost after writes to distinct registers");
      continue;
    }
    if (ls.written().count(ri)) throw Error(ErrorKind::ConstructionInvariant, "both processes rewrite register r" + std::to_string(ri));
    if (static_cast<int>(ls.written().size()) == m - 1) {  // case 3
      if (ls.remaining() == 0) throw Error(ErrorKind::CapExceeded, "step cap reached in the symmetric phase");
      ls.lockstep();
      break;
    }
    // case 4: the smallest k whose pair is two distinct fresh registers other than ri
    int k = 0;
    for (int c = 1; c <= m && k == 0; ++c) {
      const int a = ls.pi_p()(c), b = ls.pi_q()(c);
      if (a != b && a != ri && b != ri && !ls.written().count(a) && !ls.written().count(b)) k = c;
    }
    if (k == 0) throw Error(ErrorKind::ConstructionInvariant, "no fresh register pair left for renaming");
    ls.retarget(l, k);
    ++out.case4_swaps;
    if (!ls.symmetric()) throw Error(ErrorKind::ConstructionInvariant, "renamed run is not symmetric");
  }
  out.symmetric_length = ls.run().size();
  for (const Event& e : ls.run().events)
    if (e.is_write()) (e.actor == p ? out.writes_p : out.writes_q).insert(e.physical);

  // completion: solo-until-blocked, p first
  const System& sys = ls.system();
  GlobalState s = ls.state();
  Run run = ls.run();
  std::vector<bool> done(2, false), entered(2, false);
  int who = 0;
  std::set<std::vector<std::uint8_t>> seen, switches;
  const StateCodec codec(sys);
  std::vector<std::uint8_t> key(codec.width());
  std::size_t budget = ls.remaining();
  while (!(done[0] && done[1])) {
    if (done[who]) {
      who = 1 - who;
      seen.clear();
      continue;
    }
    if (budget == 0) throw Error(ErrorKind::CapExceeded, "step cap reached while completing the run");
    --budget;
    const Event e = sys.execute(s, who);
    run.events.push_back(e);
    if (e.kind == EventKind::EnterCS) {
      entered[who] = true;
      if (s.in_critical() > 1) throw Error(ErrorKind::ConstructionInvariant, "both processes in their critical sections");
    }
    if (e.kind == EventKind::EnterRemainder && entered[who]) {
      done[who] = true;
      continue;
    }
    codec.encode(s, key.data());
    if (!seen.insert(key).second) {
      if (!switches.insert(key).second)
        throw Error(ErrorKind::ConstructionInvariant, "neither process can make progress");
      who = 1 - who;
      seen.clear();
    }
  }
  out.run = std::move(run);
  out.final_state = s;
  out.pi_p = ls.pi_p();
  out.pi_q = ls.pi_q();
  out.checkpoints = ls.log();
  detail::tally(out, p);
  return out;
}

inline SymmetricRunResult lockstep_construct(ProgramPtr program, int m, std::size_t step_cap) {
  return lockstep_construct(std::move(program), new_memory(m), step_cap);
}

enum class EvenMOutcome { DeadlockCycle, MutexViolation, Inconclusive };

inline const char* to_string(EvenMOutcome o) {
  switch (o) {
    case EvenMOutcome::DeadlockCycle: return "deadlock-cycle";
    case EvenMOutcome::MutexViolation: return "mutex-violation";
    case EvenMOutcome::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct EvenMResult {
  EvenMOutcome outcome = EvenMOutcome::Inconclusive;
  std::optional<Witness> witness;
  std::vector<bool> checkpoints;
  Run run;
  std::string reason;
};

/// Lock-steps two copies of `program` over an even number of registers.
/// With no self-pair every write lock-step hits two distinct registers, so
/// the run stays symmetric; the drive stops when a global state repeats
/// (a deadlock cycle), when both processes enter together, or after
/// `step_cap` lock-steps.
inline EvenMResult even_m_drive(ProgramPtr program, int m, std::size_t step_cap) {
  if (m % 2 != 0) throw Error(ErrorKind::InvalidArgument, "the even-m drive needs an even m");
  if (step_cap == 0) throw Error(ErrorKind::InvalidArgument, "step cap must be positive");
  detail::Lockstep ls(std::move(program), new_memory(m), ProcessId(1), ProcessId(2), step_cap);
  EvenMResult out;
  const StateCodec codec(ls.system());
  std::map<std::vector<std::uint8_t>, std::size_t> seen;
  std::vector<std::uint8_t> key(codec.width());
  auto finish = [&](EvenMOutcome o, std::string reason) {
    out.outcome = o;
    out.reason = std::move(reason);
    out.checkpoints = ls.log();
    out.run = ls.run();
    return out;
  };

  while (true) {
    const Action a = ls.peek();
    if (a.kind == ActionKind::EnterCS) {
      ls.lockstep();
      finish(EvenMOutcome::MutexViolation, "both processes enter their critical sections in lock-step");
      Witness w;
      w.kind = WitnessKind::MutexViolation;
      w.run = out.run;
      w.processes = {ProcessId(1), ProcessId(2)};
      w.prefix_length = w.run.size();
      out.witness = std::move(w);
      return out;
    }
    if (a.kind == ActionKind::Write && ls.pi_p()(a.logical) == ls.pi_q()(a.logical)) {
      const int ri = ls.pi_p()(a.logical);
      if (ls.written().count(ri) || static_cast<int>(ls.written().size()) == m - 1)
        return finish(EvenMOutcome::Inconclusive, "both processes target the same register");
      int k = 0;
      for (int c = 1; c <= m && k == 0; ++c) {
        const int x = ls.pi_p()(c), y = ls.pi_q()(c);
        if (x != y && x != ri && y != ri && !ls.written().count(x) && !ls.written().count(y)) k = c;
      }
      if (k == 0) return finish(EvenMOutcome::Inconclusive, "no fresh register pair left for renaming");
      ls.retarget(a.logical, k);
      seen.clear();  // the run was rebuilt
      continue;
    }
    if (ls.used() >= step_cap) return finish(EvenMOutcome::Inconclusive, "step cap");
    ls.lockstep();
    if (!ls.log().back()) return finish(EvenMOutcome::Inconclusive, "symmetry lost");
    codec.encode(ls.state(), key.data());
    auto [it, fresh] = seen.emplace(key, ls.run().size());
    if (!fresh) {
      finish(EvenMOutcome::DeadlockCycle, "");
      Witness w;
      w.kind = WitnessKind::DeadlockCycle;
      w.run = out.run;
      w.processes = {ProcessId(1)};
      w.prefix_length = it->second;
      w.cycle_length = w.run.size() - it->second;
      out.witness = std::move(w);
      return out;
    }
  }
}

}  // namespace anonmutex
