#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "anonmutex/checker/campaign.hpp"

namespace anonmutex {

struct FuzzConfig {
  std::vector<ProgramPtr> programs;  // ids 1..n
  int m = 7;
  PermutationSpec permutations{PermutationMode::SampleRelative, 64, 42};
  std::size_t schedules = 10'000;
  std::size_t steps = 10'000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  int max_burst = 8;
  double p_enter = 0.5;
};

enum class FuzzOutcome { Clean, MutexViolation, MemorylessBreach, NoProgress };

inline const char* to_string(FuzzOutcome o) {
  switch (o) {
    case FuzzOutcome::Clean: return "clean";
    case FuzzOutcome::MutexViolation: return "mutex-violation";
    case FuzzOutcome::MemorylessBreach: return "memoryless-breach";
    case FuzzOutcome::NoProgress: return "no-progress";
  }
  return "?";
}

struct FuzzFinding {
  std::size_t schedule = 0;
  FuzzOutcome outcome = FuzzOutcome::Clean;
  Run run;  // replays to the offending state
  std::vector<ProcessId> processes;
};

struct FuzzReport {
  std::size_t schedules = 0;
  std::size_t steps = 0;
  std::size_t permutations_covered = 0;
  std::size_t mutex_violations = 0;
  std::size_t memoryless_breaches = 0;
  std::size_t progress_flags = 0;
  std::optional<FuzzFinding> first_mutex;
  std::optional<FuzzFinding> first_breach;
  std::optional<FuzzFinding> first_flag;

  bool clean() const noexcept { return mutex_violations + memoryless_breaches + progress_flags == 0; }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

namespace detail {

struct ScheduleResult {
  FuzzOutcome outcome = FuzzOutcome::Clean;
  std::size_t steps = 0;
  std::vector<ProcessId> processes;
};

/// One random schedule: `steps` steps in rounds of shuffled bursts, then a
/// drain phase of up to `steps` more steps in which nobody starts a new
/// passage. Every process that is still outside its remainder section at
/// the end of the drain is flagged. When `record` is set the events are
/// appended to it.
inline ScheduleResult run_schedule(const System& sys, std::uint64_t seed, const FuzzConfig& cfg, Run* record) {
  std::mt19937_64 rng(seed);
  const int n = sys.size();
  GlobalState s = sys.initial_state();
  const GlobalState initial = s;
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::uniform_int_distribution<int> burst(1, std::max(1, cfg.max_burst));
  std::bernoulli_distribution enter(cfg.p_enter);
  ScheduleResult out;
  int critical = 0;

  auto one = [&](int who) -> bool {
    const Section before = s.sections[who];
    const Event e = sys.execute(s, who);
    if (record) record->events.push_back(e);
    ++out.steps;
    if (e.kind == EventKind::EnterCS) ++critical;
    if (e.kind == EventKind::ExitCS) --critical;
    if (critical >= 2) {
      out.outcome = FuzzOutcome::MutexViolation;
      for (int i = 0; i < n; ++i)
        if (s.sections[i] == Section::Critical) out.processes.push_back(s.procs[i]);
      return false;
    }
    if (e.kind == EventKind::EnterRemainder && before != Section::Remainder && s.quiescent() && !(s == initial)) {
      out.outcome = FuzzOutcome::MemorylessBreach;
      return false;
    }
    return true;
  };

  for (int phase = 0; phase < 2; ++phase) {
    const bool drain = phase == 1;
    std::size_t budget = cfg.steps;
    while (budget > 0) {
      if (drain && s.quiescent()) break;
      std::shuffle(order.begin(), order.end(), rng);
      bool moved = false;
      for (int who : order) {
        if (budget == 0) break;
        if (s.sections[who] == Section::Remainder && (drain || !enter(rng))) continue;
        if (sys.next_action(s, who).kind == ActionKind::StayRemainder) continue;
        for (int b = burst(rng); b > 0 && budget > 0; --b) {
          --budget;
          moved = true;
          if (!one(who)) return out;
          if (s.sections[who] == Section::Remainder) break;
        }
      }
      if (!moved && drain) break;
    }
  }
  for (int i = 0; i < n; ++i)
    if (s.sections[i] != Section::Remainder) out.processes.push_back(s.procs[i]);
  if (!out.processes.empty()) out.outcome = FuzzOutcome::NoProgress;
  return out;
}

}  // namespace detail

/// Random fair schedules over the configured naming assignments. Schedule i
/// uses assignment set i mod |sets| and the seed splitmix64(seed + i), so
/// the report does not depend on the number of workers.
inline FuzzReport fuzz_schedules(const FuzzConfig& cfg) {
  if (cfg.schedules == 0 || cfg.steps == 0) throw Error(ErrorKind::InvalidArgument, "fuzz counts must be positive");
  if (cfg.programs.empty()) throw Error(ErrorKind::InvalidArgument, "fuzzing needs at least one process");
  const auto sets = assignment_sets(cfg.permutations, cfg.m, static_cast<int>(cfg.programs.size()));
  std::vector<System> systems;
  for (const auto& set : sets) systems.push_back(make_system(cfg.programs, cfg.m, set));

  std::vector<detail::ScheduleResult> results(cfg.schedules);
  parallel_for(cfg.schedules, cfg.workers, [&](std::size_t i) {
    results[i] = detail::run_schedule(systems[i % systems.size()], splitmix64(cfg.seed + i), cfg, nullptr);
  });

  FuzzReport rep;
  rep.schedules = cfg.schedules;
  rep.permutations_covered = std::min(sets.size(), cfg.schedules);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    rep.steps += r.steps;
    std::optional<FuzzFinding>* slot = nullptr;
    switch (r.outcome) {
      case FuzzOutcome::Clean: continue;
      case FuzzOutcome::MutexViolation: ++rep.mutex_violations; slot = &rep.first_mutex; break;
      case FuzzOutcome::MemorylessBreach: ++rep.memoryless_breaches; slot = &rep.first_breach; break;
      case FuzzOutcome::NoProgress: ++rep.progress_flags; slot = &rep.first_flag; break;
    }
    if (slot->has_value()) continue;
    const System& sys = systems[i % systems.size()];
    FuzzFinding f;
    f.schedule = i;
    f.outcome = r.outcome;
    f.run = sys.empty_run();
    detail::run_schedule(sys, splitmix64(cfg.seed + i), cfg, &f.run);
    f.processes = r.processes;
    *slot = std::move(f);
  }
  return rep;
}

}  // namespace anonmutex
