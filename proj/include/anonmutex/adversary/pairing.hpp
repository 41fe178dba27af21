#pragma once

#include <utility>
#include <vector>

#include "anonmutex/error.hpp"
#include "anonmutex/naming.hpp"

namespace anonmutex {

/// Pair k is (pi_p(r_k), pi_q(r_k)) with p on the identity and q on the
/// reverse assignment.
struct PairingTable {
  int m = 0;
  NamingAssignment pi_p;
  NamingAssignment pi_q;
  std::vector<std::pair<int, int>> pairs;

  int self_pairs() const {
    int n = 0;
    for (auto [a, b] : pairs) n += a == b;
    return n;
  }
};

inline PairingTable build_pairing(int m) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "register count must be at least 1");
  PairingTable t;
  t.m = m;
  t.pi_p = NamingAssignment::identity(m);
  t.pi_q = NamingAssignment::reverse(m);
  for (int k = 1; k <= m; ++k) t.pairs.emplace_back(t.pi_p(k), t.pi_q(k));
  return t;
}

}  // namespace anonmutex
