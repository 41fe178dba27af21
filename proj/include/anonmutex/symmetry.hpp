#pragma once

#include "anonmutex/error.hpp"
#include "anonmutex/naming.hpp"
#include "anonmutex/state.hpp"

namespace anonmutex {

/// Mirror clause shared by registers and local variables: equal and naming
/// neither process, or p/q, or q/p.
inline bool mirrored(const RegisterValue& at_p, const RegisterValue& at_q, ProcessId p, ProcessId q) {
  if (at_p == at_q) return !at_p.is(p) && !at_p.is(q);
  return (at_p.is(p) && at_q.is(q)) || (at_p.is(q) && at_q.is(p));
}

inline bool mirrored_locals(const LocalState& a, const LocalState& b, ProcessId p, ProcessId q) {
  if (a.location != b.location || a.counter != b.counter || a.j != b.j || a.k != b.k || a.go != b.go) return false;
  if (a.view.size() != b.view.size()) return false;
  if (!mirrored(RegisterValue::owned(a.self), RegisterValue::owned(b.self), p, q)) return false;
  for (std::size_t i = 0; i < a.view.size(); ++i)
    if (!mirrored(a.view[i], b.view[i], p, q)) return false;
  return true;
}

/// State symmetric w.r.t. p and q under their naming assignments: every
/// register pair (pi_p(r_k), pi_q(r_k)) and every local variable pair is
/// mirrored, and both processes are at the same location and section.
inline bool is_symmetric_state(const GlobalState& s, ProcessId p, ProcessId q, const NamingAssignment& pi_p,
                               const NamingAssignment& pi_q) {
  if (p == q) throw Error(ErrorKind::InvalidArgument, "symmetry needs two distinct processes");
  const int m = s.memory.size();
  if (pi_p.size() != m || pi_q.size() != m) throw Error(ErrorKind::InvalidArgument, "naming assignment size differs from m");
  for (int k = 1; k <= m; ++k)
    if (!mirrored(s.memory[pi_p(k)], s.memory[pi_q(k)], p, q)) return false;
  const int ip = s.index_of(p);
  const int iq = s.index_of(q);
  if (s.sections[ip] != s.sections[iq]) return false;
  if (s.locals.empty()) return true;
  return mirrored_locals(s.locals[ip], s.locals[iq], p, q);
}

}  // namespace anonmutex
