#pragma once

#include <cstdint>
#include <cstring>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "anonmutex/error.hpp"
#include "anonmutex/system.hpp"

namespace anonmutex {

struct ExplorationLimits {
  std::size_t max_states = 5'000'000;
  std::size_t max_depth = std::numeric_limits<std::uint32_t>::max();
};

/// Fixed-width byte encoding of a GlobalState for one System. Register
/// values become 0 (free), 1 (waiting) or 2+i for the i-th process.
class StateCodec {
 public:
  explicit StateCodec(const System& sys) : procs_(sys.procs()), m_(sys.registers()), n_(sys.size()) {
    if (n_ + 2 > 255 || m_ > 255) throw Error(ErrorKind::InvalidConfiguration, "system too large to encode");
    width_ = static_cast<std::size_t>(m_) + static_cast<std::size_t>(n_) * (kLocalFields + m_);
  }

  std::size_t width() const noexcept { return width_; }

  void encode(const GlobalState& s, std::uint8_t* out) const {
    for (int r = 1; r <= m_; ++r) *out++ = value_code(s.memory[r]);
    for (int i = 0; i < n_; ++i) {
      const LocalState& l = s.locals[i];
      *out++ = static_cast<std::uint8_t>(s.sections[i]);
      *out++ = small(l.location);
      *out++ = small(l.counter);
      *out++ = small(l.j);
      *out++ = small(l.k);
      *out++ = l.go ? 1 : 0;
      if (static_cast<int>(l.view.size()) > m_) throw Error(ErrorKind::InvalidConfiguration, "view longer than m");
      for (int r = 0; r < m_; ++r) *out++ = r < static_cast<int>(l.view.size()) ? value_code(l.view[r]) : 0xFF;
    }
  }

  GlobalState decode(const std::uint8_t* in) const {
    GlobalState s;
    std::vector<RegisterValue> mem;
    for (int r = 0; r < m_; ++r) mem.push_back(value_of(*in++));
    s.memory = MemoryState(std::move(mem));
    s.procs = procs_;
    for (int i = 0; i < n_; ++i) {
      LocalState l;
      l.self = procs_[i];
      s.sections.push_back(static_cast<Section>(*in++));
      l.location = *in++;
      l.counter = *in++;
      l.j = *in++;
      l.k = *in++;
      l.go = *in++ != 0;
      for (int r = 0; r < m_; ++r, ++in)
        if (*in != 0xFF) l.view.push_back(value_of(*in));
      s.locals.push_back(std::move(l));
    }
    return s;
  }

  Section section(const std::uint8_t* key, int who) const {
    return static_cast<Section>(key[m_ + static_cast<std::size_t>(who) * (kLocalFields + m_)]);
  }

 private:
  static constexpr int kLocalFields = 6;

  static std::uint8_t small(int v) {
    if (v < 0 || v > 254) throw Error(ErrorKind::InvalidConfiguration, "local variable out of encodable range");
    return static_cast<std::uint8_t>(v);
  }

  std::uint8_t value_code(const RegisterValue& v) const {
    if (v.is_free()) return 0;
    if (v.is_waiting()) return 1;
    for (int i = 0; i < n_; ++i)
      if (procs_[i] == v.owner()) return static_cast<std::uint8_t>(2 + i);
    throw Error(ErrorKind::InvalidConfiguration, "register holds an identifier outside the system");
  }

  RegisterValue value_of(std::uint8_t c) const {
    if (c == 0) return RegisterValue::free();
    if (c == 1) return RegisterValue::waiting();
    return RegisterValue::owned(procs_[c - 2]);
  }

  std::vector<ProcessId> procs_;
  int m_;
  int n_;
  std::size_t width_;
};

/// Reachable interleaving graph. State 0 is the initial state; every state
/// has one outgoing edge per process that can act (a process in its
/// remainder acts by beginning its entry section).
class StateGraph {
 public:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  StateGraph(const System& sys, const GlobalState& initial) : sys_(sys), codec_(sys_), initial_(initial) {}

  const System& system() const noexcept { return sys_; }
  const StateCodec& codec() const noexcept { return codec_; }
  const GlobalState& initial() const noexcept { return initial_; }
  int processes() const noexcept { return sys_.size(); }

  std::size_t states() const noexcept { return parent_.size(); }
  std::size_t expanded() const noexcept { return expanded_; }
  bool truncated() const noexcept { return expanded_ < states(); }
  bool hit_state_cap() const noexcept { return state_cap_hit_; }
  bool hit_depth_cap() const noexcept { return depth_cap_hit_; }

  const std::uint8_t* key(std::uint32_t id) const { return arena_.data() + static_cast<std::size_t>(id) * codec_.width(); }
  GlobalState state(std::uint32_t id) const { return codec_.decode(key(id)); }
  Section section(std::uint32_t id, int who) const { return codec_.section(key(id), who); }
  bool is_expanded(std::uint32_t id) const { return id < expanded_; }

  std::uint32_t successor(std::uint32_t id, int who) const { return succ_[edge(id, who)]; }
  EventKind edge_kind(std::uint32_t id, int who) const { return static_cast<EventKind>(kind_[edge(id, who)]); }
  std::uint32_t parent(std::uint32_t id) const { return parent_[id]; }
  int parent_actor(std::uint32_t id) const { return actor_[id]; }
  std::uint32_t depth(std::uint32_t id) const { return depth_[id]; }

  /// Scheduling choices (process indices) leading from the initial state.
  std::vector<int> path_to(std::uint32_t id) const {
    std::vector<int> path;
    while (id != 0) {
      path.push_back(actor_[id]);
      id = parent_[id];
    }
    return {path.rbegin(), path.rend()};
  }

  /// Run obtained by scheduling `path` from the initial state.
  Run run_of(const std::vector<int>& path) const {
    Execution ex(sys_, initial_.memory);
    for (int who : path) ex.step(who);
    return std::move(ex).take_run();
  }

  void build(const ExplorationLimits& limits) {
    if (limits.max_states == 0 || limits.max_depth == 0)
      throw Error(ErrorKind::InvalidArgument, "exploration limits must be positive");
    const int n = processes();
    std::vector<std::uint8_t> buf(codec_.width());
    codec_.encode(initial_, buf.data());
    insert(buf.data(), kNone, 0, 0);
    for (expanded_ = 0; expanded_ < states(); ++expanded_) {
      const std::uint32_t id = static_cast<std::uint32_t>(expanded_);
      if (depth_[id] >= limits.max_depth) {
        depth_cap_hit_ = true;
        break;
      }
      const GlobalState s = state(id);
      bool capped = false;
      for (int w = 0; w < n; ++w) {
        const Action a = sys_.next_action(s, w);
        if (a.kind == ActionKind::StayRemainder) continue;
        if (states() >= limits.max_states) {
          // cannot add new states; keep the edge only if the target is known
          GlobalState t = s;
          const Event e = sys_.execute(t, w);
          codec_.encode(t, buf.data());
          const std::uint32_t found = find(buf.data());
          if (found == kNone) {
            capped = true;
            continue;
          }
          set_edge(id, w, found, e.kind);
          continue;
        }
        GlobalState t = s;
        const Event e = sys_.execute(t, w);
        codec_.encode(t, buf.data());
        std::uint32_t target = find(buf.data());
        if (target == kNone) target = insert(buf.data(), id, w, depth_[id] + 1);
        set_edge(id, w, target, e.kind);
      }
      if (capped) {
        state_cap_hit_ = true;
        // leave this state unexpanded: its out-edges are incomplete
        clear_edges(id);
        break;
      }
    }
  }

 private:
  std::size_t edge(std::uint32_t id, int who) const { return static_cast<std::size_t>(id) * processes() + who; }

  void set_edge(std::uint32_t from, int who, std::uint32_t to, EventKind k) {
    succ_[edge(from, who)] = to;
    kind_[edge(from, who)] = static_cast<std::uint8_t>(k);
  }
  void clear_edges(std::uint32_t id) {
    for (int w = 0; w < processes(); ++w) succ_[edge(id, w)] = kNone;
  }

  std::uint64_t hash(const std::uint8_t* k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < codec_.width(); ++i) h = (h ^ k[i]) * 1099511628211ull;
    return h ^ (h >> 29);
  }

  std::uint32_t find(const std::uint8_t* k) const {
    if (table_.empty()) return kNone;
    const std::size_t mask = table_.size() - 1;
    for (std::size_t slot = hash(k) & mask;; slot = (slot + 1) & mask) {
      const std::uint32_t id = table_[slot];
      if (id == kNone) return kNone;
      if (std::memcmp(key(id), k, codec_.width()) == 0) return id;
    }
  }

  void grow() {
    std::vector<std::uint32_t> fresh(table_.empty() ? 1024 : table_.size() * 2, kNone);
    const std::size_t mask = fresh.size() - 1;
    for (std::uint32_t id = 0; id < states(); ++id) {
      std::size_t slot = hash(key(id)) & mask;
      while (fresh[slot] != kNone) slot = (slot + 1) & mask;
      fresh[slot] = id;
    }
    table_.swap(fresh);
  }

  std::uint32_t insert(const std::uint8_t* k, std::uint32_t parent, int actor, std::uint32_t depth) {
    if ((states() + 1) * 2 > table_.size()) grow();
    const std::uint32_t id = static_cast<std::uint32_t>(states());
    arena_.insert(arena_.end(), k, k + codec_.width());
    parent_.push_back(parent);
    actor_.push_back(static_cast<std::uint8_t>(actor));
    depth_.push_back(depth);
    succ_.resize(succ_.size() + processes(), kNone);
    kind_.resize(kind_.size() + processes(), 0);
    const std::size_t mask = table_.size() - 1;
    std::size_t slot = hash(k) & mask;
    while (table_[slot] != kNone) slot = (slot + 1) & mask;
    table_[slot] = id;
    return id;
  }

  System sys_;
  StateCodec codec_;
  GlobalState initial_;
  std::vector<std::uint8_t> arena_;
  std::vector<std::uint32_t> table_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> actor_;
  std::vector<std::uint32_t> depth_;
  std::vector<std::uint32_t> succ_;
  std::vector<std::uint8_t> kind_;
  std::size_t expanded_ = 0;
  bool state_cap_hit_ = false;
  bool depth_cap_hit_ = false;
};

/// Builds the reachable graph of `sys` from the all-free memory (or the
/// given quiescent memory).
inline StateGraph explore(const System& sys, const ExplorationLimits& limits, const MemoryState& memory) {
  StateGraph g(sys, sys.initial_state(memory));
  g.build(limits);
  return g;
}
inline StateGraph explore(const System& sys, const ExplorationLimits& limits) {
  return explore(sys, limits, new_memory(sys.registers()));
}

}  // namespace anonmutex
