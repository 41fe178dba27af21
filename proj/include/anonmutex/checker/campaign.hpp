#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "anonmutex/checker/permutations.hpp"
#include "anonmutex/checker/properties.hpp"
#include "anonmutex/system.hpp"

namespace anonmutex {

/// Runs `job(i)` for i in [0, count) on up to `workers` threads. Each index
/// is handled by exactly one worker; results are written by index.
template <class Job>
void parallel_for(std::size_t count, unsigned workers, Job&& job) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < count;) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Folds per-permutation reports of one property: Violated beats
/// Inconclusive beats HoldsWithinBounds; the first (in permutation order)
/// witness or reason is kept.
inline PropertyReport merge_reports(const std::vector<PropertyReport>& parts) {
  PropertyReport out;
  if (parts.empty()) return out;
  out.property = parts.front().property;
  out.permutations_covered = 0;
  auto rank = [](Verdict v) { return v == Verdict::Violated ? 2 : v == Verdict::Inconclusive ? 1 : 0; };
  for (const PropertyReport& r : parts) {
    out.states_visited += r.states_visited;
    out.permutations_covered += r.permutations_covered;
    if (rank(r.verdict) > rank(out.verdict)) {
      out.verdict = r.verdict;
      out.witness = r.witness;
      out.reason = r.reason;
    }
    for (const GlobalState& q : r.quiescent)
      if (std::find(out.quiescent.begin(), out.quiescent.end(), q) == out.quiescent.end()) out.quiescent.push_back(q);
  }
  return out;
}

struct CheckRequest {
  std::vector<ProgramPtr> programs;  // one per process; ids are 1..n
  int m = 7;
  PermutationSpec permutations;
  ExplorationLimits limits;
  unsigned workers = 1;
};

struct CheckResult {
  std::vector<PropertyReport> reports;  // mutex, deadlock, starvation, memoryless
  std::vector<std::vector<NamingAssignment>> assignments;
};

inline System make_system(const std::vector<ProgramPtr>& programs, int m, const std::vector<NamingAssignment>& naming) {
  std::vector<System::Member> members;
  for (std::size_t i = 0; i < programs.size(); ++i)
    members.push_back({ProcessId(static_cast<std::uint32_t>(i + 1)), programs[i], naming.at(i)});
  return System(m, std::move(members));
}

/// Explores the system once per naming-assignment tuple and runs every
/// property check on each graph.
inline CheckResult check_programs(const CheckRequest& req) {
  CheckResult out;
  out.assignments = assignment_sets(req.permutations, req.m, static_cast<int>(req.programs.size()));
  std::vector<std::vector<PropertyReport>> per(out.assignments.size());
  parallel_for(out.assignments.size(), req.workers, [&](std::size_t i) {
    const System sys = make_system(req.programs, req.m, out.assignments[i]);
    const StateGraph g = explore(sys, req.limits);
    per[i] = check_all(g);
  });
  for (std::size_t prop = 0; prop < 4; ++prop) {
    std::vector<PropertyReport> parts;
    for (auto& p : per) parts.push_back(p[prop]);
    out.reports.push_back(merge_reports(parts));
  }
  return out;
}

}  // namespace anonmutex
