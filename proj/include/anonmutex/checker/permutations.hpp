#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "anonmutex/error.hpp"
#include "anonmutex/naming.hpp"

namespace anonmutex {

enum class PermutationMode { FixedPair, EnumerateRelative, SampleRelative };

/// Which naming assignments to cover. The first process always uses the
/// identity; only the others' assignments, relative to it, vary.
struct PermutationSpec {
  PermutationMode mode = PermutationMode::FixedPair;
  std::size_t count = 64;
  std::uint64_t seed = 42;
};

/// `fixed`, `enumerate` or `sample:N:seedS`.
inline PermutationSpec parse_permutation_spec(const std::string& text) {
  PermutationSpec spec;
  if (text == "fixed") return spec;
  if (text == "enumerate") {
    spec.mode = PermutationMode::EnumerateRelative;
    return spec;
  }
  const std::string bad = "permutation mode must be fixed, enumerate or sample:N:seedS, got '" + text + "'";
  if (text.rfind("sample:", 0) != 0) throw Error(ErrorKind::InvalidArgument, bad);
  const std::string rest = text.substr(7);
  const auto colon = rest.find(':');
  if (colon == std::string::npos || rest.compare(colon + 1, 4, "seed") != 0) throw Error(ErrorKind::InvalidArgument, bad);
  try {
    std::size_t used = 0;
    const std::string count = rest.substr(0, colon);
    const std::string seed = rest.substr(colon + 5);
    spec.count = std::stoull(count, &used);
    if (used != count.size() || count[0] == '-') throw Error(ErrorKind::InvalidArgument, bad);
    spec.seed = std::stoull(seed, &used);
    if (used != seed.size() || seed[0] == '-') throw Error(ErrorKind::InvalidArgument, bad);
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::InvalidArgument, bad);
  }
  if (spec.count == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be positive");
  spec.mode = PermutationMode::SampleRelative;
  return spec;
}

inline std::string to_string(const PermutationSpec& spec) {
  switch (spec.mode) {
    case PermutationMode::FixedPair: return "fixed";
    case PermutationMode::EnumerateRelative: return "enumerate";
    case PermutationMode::SampleRelative:
      return "sample:" + std::to_string(spec.count) + ":seed" + std::to_string(spec.seed);
  }
  return "?";
}

/// Identity for even positions, reverse for odd ones.
inline std::vector<NamingAssignment> fixed_assignments(int m, int n) {
  std::vector<NamingAssignment> out;
  for (int i = 0; i < n; ++i) out.push_back(i % 2 ? NamingAssignment::reverse(m) : NamingAssignment::identity(m));
  return out;
}

inline NamingAssignment random_assignment(int m, std::mt19937_64& rng) {
  std::vector<int> t(m);
  for (int k = 0; k < m; ++k) t[k] = k + 1;
  for (int k = m - 1; k > 0; --k) {
    std::uniform_int_distribution<int> pick(0, k);
    std::swap(t[k], t[pick(rng)]);
  }
  return NamingAssignment(std::move(t));
}

inline std::vector<NamingAssignment> all_assignments(int m) {
  std::vector<int> t(m);
  for (int k = 0; k < m; ++k) t[k] = k + 1;
  std::vector<NamingAssignment> out;
  do out.emplace_back(t);
  while (std::next_permutation(t.begin(), t.end()));
  return out;
}

/// Every assignment tuple selected by a permutation mode, in a fixed order.
inline std::vector<std::vector<NamingAssignment>> assignment_sets(const PermutationSpec& spec, int m, int n) {
  std::vector<std::vector<NamingAssignment>> out;
  switch (spec.mode) {
    case PermutationMode::FixedPair: out.push_back(fixed_assignments(m, n)); break;
    case PermutationMode::SampleRelative: {
      out.push_back(fixed_assignments(m, n));
      std::mt19937_64 rng(spec.seed);
      for (std::size_t s = 0; s < spec.count; ++s) {
        std::vector<NamingAssignment> set{NamingAssignment::identity(m)};
        for (int i = 1; i < n; ++i) set.push_back(random_assignment(m, rng));
        out.push_back(std::move(set));
      }
      break;
    }
    case PermutationMode::EnumerateRelative: {
      const auto all = all_assignments(m);
      std::vector<std::size_t> digits(n > 1 ? n - 1 : 0, 0);
      while (true) {
        std::vector<NamingAssignment> set{NamingAssignment::identity(m)};
        for (std::size_t d : digits) set.push_back(all[d]);
        out.push_back(std::move(set));
        std::size_t pos = 0;
        while (pos < digits.size() && ++digits[pos] == all.size()) digits[pos++] = 0;
        if (pos == digits.size()) break;
      }
      break;
    }
  }
  return out;
}

}  // namespace anonmutex
