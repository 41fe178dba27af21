#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <string>
#include <utility>
#include <vector>

#include "anonmutex/checker/explore.hpp"

namespace anonmutex {

enum class Property { Mutex, DeadlockFree, StarvationFree, Memoryless };
enum class Verdict { HoldsWithinBounds, Violated, Inconclusive };
enum class WitnessKind { MutexViolation, StarvationLasso, DeadlockCycle, MemorylessBreach };

inline const char* to_string(Property p) {
  switch (p) {
    case Property::Mutex: return "mutex";
    case Property::DeadlockFree: return "deadlock-free";
    case Property::StarvationFree: return "starvation-free";
    case Property::Memoryless: return "memoryless";
  }
  return "?";
}

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::HoldsWithinBounds: return "holds-within-bounds";
    case Verdict::Violated: return "violated";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

inline const char* to_string(WitnessKind k) {
  switch (k) {
    case WitnessKind::MutexViolation: return "mutex-violation";
    case WitnessKind::StarvationLasso: return "starvation-lasso";
    case WitnessKind::DeadlockCycle: return "deadlock-cycle";
    case WitnessKind::MemorylessBreach: return "memoryless-breach";
  }
  return "?";
}

/// A replayable run exhibiting a violation. For lassos the state after
/// `prefix_length` events equals the final state.
struct Witness {
  WitnessKind kind = WitnessKind::MutexViolation;
  Run run;
  std::vector<ProcessId> processes;  // both CS occupants, or the starved process
  std::size_t prefix_length = 0;
  std::size_t cycle_length = 0;
};

struct PropertyReport {
  Property property = Property::Mutex;
  Verdict verdict = Verdict::HoldsWithinBounds;
  std::optional<Witness> witness;
  std::string reason;  // for Inconclusive
  std::size_t states_visited = 0;
  std::size_t permutations_covered = 1;
  std::vector<GlobalState> quiescent;  // Memoryless only
};

namespace detail {

inline PropertyReport base_report(const StateGraph& g, Property p) {
  PropertyReport r;
  r.property = p;
  r.states_visited = g.states();
  return r;
}

inline std::string truncation_reason(const StateGraph& g) {
  return g.hit_depth_cap() ? "depth cap" : "state cap";
}

inline Witness path_witness(const StateGraph& g, std::uint32_t id, WitnessKind kind, std::vector<ProcessId> procs) {
  Witness w;
  w.kind = kind;
  w.run = g.run_of(g.path_to(id));
  w.processes = std::move(procs);
  w.prefix_length = w.run.size();
  return w;
}

}  // namespace detail

inline PropertyReport check_mutual_exclusion(const StateGraph& g) {
  PropertyReport r = detail::base_report(g, Property::Mutex);
  const int n = g.processes();
  for (std::uint32_t id = 0; id < g.states(); ++id) {
    std::vector<ProcessId> inside;
    for (int w = 0; w < n; ++w)
      if (g.section(id, w) == Section::Critical) inside.push_back(g.system().procs()[w]);
    if (inside.size() >= 2) {
      r.verdict = Verdict::Violated;
      r.witness = detail::path_witness(g, id, WitnessKind::MutexViolation, std::move(inside));
      return r;
    }
  }
  return r;
}

/// Also lists every visited quiescent state.
inline PropertyReport check_memoryless(const StateGraph& g) {
  PropertyReport r = detail::base_report(g, Property::Memoryless);
  const int n = g.processes();
  const std::size_t width = g.codec().width();
  std::optional<std::uint32_t> breach;
  for (std::uint32_t id = 0; id < g.states(); ++id) {
    bool quiet = true;
    for (int w = 0; w < n && quiet; ++w) quiet = g.section(id, w) == Section::Remainder;
    if (!quiet) continue;
    r.quiescent.push_back(g.state(id));
    if (!breach && !std::equal(g.key(id), g.key(id) + width, g.key(0))) breach = id;
  }
  if (breach) {
    r.verdict = Verdict::Violated;
    r.witness = detail::path_witness(g, *breach, WitnessKind::MemorylessBreach, {});
  }
  return r;
}

namespace detail {

/// Cycle search restricted to states where `starved` is in its entry
/// section and every process outside `active` (a bitmask) is in its
/// remainder, using only edges taken by active processes. A qualifying
/// cycle must contain an edge by every active process; with `no_entry` it
/// must contain no enter-cs edge at all.
class FairCycleSearch {
 public:
  FairCycleSearch(const StateGraph& g, int starved, std::uint32_t active, bool no_entry)
      : g_(g), starved_(starved), active_(active), no_entry_(no_entry), n_(g.processes()) {}

  std::optional<Witness> run(WitnessKind kind) {
    const std::uint32_t N = static_cast<std::uint32_t>(g_.states());
    index_.assign(N, kNone);
    low_.assign(N, 0);
    comp_.assign(N, kNone);
    on_stack_.assign(N, false);
    for (std::uint32_t v = 0; v < N; ++v)
      if (index_[v] == kNone && node_ok(v)) strongconnect(v);

    std::vector<std::uint32_t> covered(comps_, 0);
    for (std::uint32_t v = 0; v < N; ++v) {
      if (comp_[v] == kNone) continue;
      for (int w = 0; w < n_; ++w) {
        std::uint32_t t = target(v, w);
        if (t != kNone && comp_[t] == comp_[v]) covered[comp_[v]] |= 1u << w;
      }
    }
    for (std::uint32_t c = 0; c < comps_; ++c)
      if ((covered[c] & active_) == active_) return witness(c, kind);
    return std::nullopt;
  }

 private:
  static constexpr std::uint32_t kNone = StateGraph::kNone;

  bool node_ok(std::uint32_t v) const {
    if (!g_.is_expanded(v) || g_.section(v, starved_) != Section::Entry) return false;
    for (int w = 0; w < n_; ++w)
      if (!(active_ >> w & 1u) && g_.section(v, w) != Section::Remainder) return false;
    return true;
  }

  std::uint32_t target(std::uint32_t v, int w) const {
    if (!(active_ >> w & 1u)) return kNone;
    const std::uint32_t t = g_.successor(v, w);
    if (t == kNone || !node_ok(t)) return kNone;
    if (no_entry_ && g_.edge_kind(v, w) == EventKind::EnterCS) return kNone;
    return t;
  }

  void strongconnect(std::uint32_t root) {
    std::vector<std::pair<std::uint32_t, int>> calls;
    auto open = [&](std::uint32_t v) {
      index_[v] = low_[v] = counter_++;
      stack_.push_back(v);
      on_stack_[v] = true;
      calls.emplace_back(v, 0);
    };
    open(root);
    while (!calls.empty()) {
      auto& [v, next] = calls.back();
      if (next < n_) {
        const int w = next++;
        const std::uint32_t t = target(v, w);
        if (t == kNone) continue;
        if (index_[t] == kNone) {
          open(t);
        } else if (on_stack_[t]) {
          low_[v] = std::min(low_[v], index_[t]);
        }
        continue;
      }
      const std::uint32_t done = v;
      calls.pop_back();
      if (!calls.empty()) low_[calls.back().first] = std::min(low_[calls.back().first], low_[done]);
      if (low_[done] == index_[done]) {
        std::uint32_t x;
        do {
          x = stack_.back();
          stack_.pop_back();
          on_stack_[x] = false;
          comp_[x] = comps_;
        } while (x != done);
        ++comps_;
      }
    }
  }

  /// Scheduling choices leading from `from` to `to` inside component c.
  std::vector<int> path_within(std::uint32_t from, std::uint32_t to, std::uint32_t c) const {
    if (from == to) return {};
    std::vector<std::uint32_t> order{from};
    std::unordered_map<std::uint32_t, std::pair<std::uint32_t, int>> prev;
    prev[from] = {kNone, -1};
    for (std::size_t i = 0; i < order.size(); ++i) {
      const std::uint32_t v = order[i];
      for (int w = 0; w < n_; ++w) {
        const std::uint32_t t = target(v, w);
        if (t == kNone || comp_[t] != c || prev.count(t)) continue;
        prev[t] = {v, w};
        if (t == to) {
          std::vector<int> path;
          for (std::uint32_t x = to; x != from; x = prev[x].first) path.push_back(prev[x].second);
          return {path.rbegin(), path.rend()};
        }
        order.push_back(t);
      }
    }
    throw Error(ErrorKind::ConstructionInvariant, "component is not strongly connected");
  }

  Witness witness(std::uint32_t c, WitnessKind kind) const {
    // one internal edge per active process
    std::vector<std::pair<std::uint32_t, int>> edges;
    for (int w = 0; w < n_; ++w) {
      if (!(active_ >> w & 1u)) continue;
      for (std::uint32_t v = 0; v < comp_.size(); ++v) {
        if (comp_[v] != c) continue;
        const std::uint32_t t = target(v, w);
        if (t != kNone && comp_[t] == c) {
          edges.emplace_back(v, w);
          break;
        }
      }
    }
    const std::uint32_t start = edges.front().first;
    std::vector<int> cycle;
    std::uint32_t cur = start;
    for (auto [v, w] : edges) {
      auto hop = path_within(cur, v, c);
      cycle.insert(cycle.end(), hop.begin(), hop.end());
      cycle.push_back(w);
      cur = target(v, w);
    }
    auto home = path_within(cur, start, c);
    cycle.insert(cycle.end(), home.begin(), home.end());

    std::vector<int> path = g_.path_to(start);
    Witness out;
    out.kind = kind;
    out.prefix_length = path.size();
    out.cycle_length = cycle.size();
    path.insert(path.end(), cycle.begin(), cycle.end());
    out.run = g_.run_of(path);
    out.processes = {g_.system().procs()[starved_]};
    return out;
  }

  const StateGraph& g_;
  int starved_;
  std::uint32_t active_;
  bool no_entry_;
  int n_;
  std::vector<std::uint32_t> index_, low_, comp_, stack_;
  std::vector<bool> on_stack_;
  std::uint32_t counter_ = 0;
  std::uint32_t comps_ = 0;
};

inline PropertyReport liveness(const StateGraph& g, Property p, bool no_entry, WitnessKind kind) {
  PropertyReport r = base_report(g, p);
  if (g.truncated()) {
    r.verdict = Verdict::Inconclusive;
    r.reason = truncation_reason(g);
    return r;
  }
  const int n = g.processes();
  if (n > 16) throw Error(ErrorKind::InvalidConfiguration, "liveness search supports at most 16 processes");
  for (int s = 0; s < n; ++s) {
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      if (!(mask >> s & 1u)) continue;
      if (auto w = FairCycleSearch(g, s, mask, no_entry).run(kind)) {
        r.verdict = Verdict::Violated;
        r.witness = std::move(*w);
        return r;
      }
    }
  }
  return r;
}

}  // namespace detail

/// A lasso in which some process stays in its entry section while every
/// process outside its remainder keeps taking steps.
inline PropertyReport check_starvation_freedom(const StateGraph& g) {
  return detail::liveness(g, Property::StarvationFree, false, WitnessKind::StarvationLasso);
}

/// As above, and additionally nobody enters the critical section on the cycle.
inline PropertyReport check_deadlock_freedom(const StateGraph& g) {
  return detail::liveness(g, Property::DeadlockFree, true, WitnessKind::DeadlockCycle);
}

inline std::vector<PropertyReport> check_all(const StateGraph& g) {
  return {check_mutual_exclusion(g), check_deadlock_freedom(g), check_starvation_freedom(g), check_memoryless(g)};
}

/// Replays a witness against `sys` and checks that it exhibits what it
/// claims. Returns an empty string when it does, otherwise the reason.
inline std::string validate_witness(const System& sys, const Witness& w) {
  GlobalState s;
  std::vector<GlobalState> trail;
  try {
    s = sys.initial_state(w.run.initial);
    sys.check_compatible(w.run);
    trail.push_back(s);
    for (std::size_t i = 0; i < w.run.events.size(); ++i) {
      sys.replay_one(s, w.run.events[i], i);
      trail.push_back(s);
    }
  } catch (const Error& e) {
    return e.what();
  }
  switch (w.kind) {
    case WitnessKind::MutexViolation: {
      if (w.processes.size() < 2) return "fewer than two processes named";
      for (ProcessId p : w.processes)
        if (s.section(p) != Section::Critical) return "named process not in its critical section";
      return "";
    }
    case WitnessKind::MemorylessBreach: {
      if (!s.quiescent()) return "final state is not quiescent";
      if (s == sys.initial_state(w.run.initial)) return "final state equals the initial state";
      return "";
    }
    case WitnessKind::StarvationLasso:
    case WitnessKind::DeadlockCycle: {
      if (w.processes.size() != 1) return "lasso names no starved process";
      if (w.cycle_length == 0 || w.prefix_length + w.cycle_length != w.run.size()) return "bad lasso lengths";
      if (!(trail[w.prefix_length] == s)) return "cycle does not return to its first state";
      const int starved = s.index_of(w.processes[0]);
      std::vector<bool> stepped(s.procs.size(), false), busy(s.procs.size(), false);
      for (std::size_t i = w.prefix_length; i <= w.run.size(); ++i) {
        if (trail[i].sections[starved] != Section::Entry) return "starved process leaves its entry section";
        for (std::size_t k = 0; k < s.procs.size(); ++k) busy[k] = busy[k] || trail[i].sections[k] != Section::Remainder;
      }
      for (std::size_t i = w.prefix_length; i < w.run.size(); ++i) {
        const Event& e = w.run.events[i];
        stepped[s.index_of(e.actor)] = true;
        if (w.kind == WitnessKind::DeadlockCycle && e.kind == EventKind::EnterCS) return "cycle enters a critical section";
      }
      for (std::size_t k = 0; k < s.procs.size(); ++k)
        if (busy[k] && !stepped[k]) return "an active process never steps in the cycle";
      return "";
    }
  }
  return "unknown witness kind";
}

}  // namespace anonmutex
