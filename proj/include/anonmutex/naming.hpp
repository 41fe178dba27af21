#pragma once

#include <string>
#include <vector>

#include "anonmutex/error.hpp"

namespace anonmutex {

/// A process's private numbering of the anonymous registers: logical index
/// (1..m) to physical index (1..m). Always a bijection.
class NamingAssignment {
 public:
  NamingAssignment() = default;

  explicit NamingAssignment(std::vector<int> table) : table_(std::move(table)) {
    const int m = size();
    if (m < 1) throw Error(ErrorKind::InvalidArgument, "naming assignment over zero registers");
    std::vector<bool> seen(m + 1, false);
    for (int phys : table_) {
      if (phys < 1 || phys > m || seen[phys])
        throw Error(ErrorKind::InvalidArgument, "naming table is not a permutation of 1.." + std::to_string(m));
      seen[phys] = true;
    }
  }

  static NamingAssignment identity(int m) {
    std::vector<int> t(m);
    for (int k = 0; k < m; ++k) t[k] = k + 1;
    return NamingAssignment(std::move(t));
  }

  /// r_k -> r_{m-k+1}
  static NamingAssignment reverse(int m) {
    std::vector<int> t(m);
    for (int k = 0; k < m; ++k) t[k] = m - k;
    return NamingAssignment(std::move(t));
  }

  int size() const noexcept { return static_cast<int>(table_.size()); }

  int operator()(int logical) const {
    if (logical < 1 || logical > size())
      throw Error(ErrorKind::InvalidArgument, "logical index " + std::to_string(logical) + " out of range");
    return table_[logical - 1];
  }

  /// Logical index that maps onto `physical`.
  int logical_of(int physical) const {
    for (int k = 0; k < size(); ++k)
      if (table_[k] == physical) return k + 1;
    throw Error(ErrorKind::InvalidArgument, "physical index " + std::to_string(physical) + " out of range");
  }

  const std::vector<int>& table() const noexcept { return table_; }

  /// this(inner(k))
  NamingAssignment compose(const NamingAssignment& inner) const {
    std::vector<int> t(inner.size());
    for (int k = 1; k <= inner.size(); ++k) t[k - 1] = (*this)(inner(k));
    return NamingAssignment(std::move(t));
  }

  NamingAssignment inverse() const {
    std::vector<int> t(size());
    for (int k = 1; k <= size(); ++k) t[table_[k - 1] - 1] = k;
    return NamingAssignment(std::move(t));
  }

  friend bool operator==(const NamingAssignment&, const NamingAssignment&) = default;

 private:
  std::vector<int> table_;
};

/// Exchange the images of logical indices i and j.
inline NamingAssignment swap_naming(const NamingAssignment& pi, int i, int j) {
  const int m = pi.size();
  if (i < 1 || i > m || j < 1 || j > m)
    throw Error(ErrorKind::InvalidArgument, "swap index out of 1.." + std::to_string(m));
  std::vector<int> t = pi.table();
  std::swap(t[i - 1], t[j - 1]);
  return NamingAssignment(std::move(t));
}

inline std::string to_string(const NamingAssignment& pi) {
  std::string out;
  for (int phys : pi.table()) {
    if (!out.empty()) out += ' ';
    out += std::to_string(phys);
  }
  return out;
}

}  // namespace anonmutex
