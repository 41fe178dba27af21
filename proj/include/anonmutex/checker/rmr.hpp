#pragma once

#include <set>
#include <vector>

#include "anonmutex/run.hpp"

namespace anonmutex {

/// Remote memory references under the cache-coherent model, per process
/// and per passage (a passage ends with enter-remainder; a trailing
/// unfinished passage is listed too).
struct RmrReport {
  std::vector<ProcessId> procs;
  std::vector<std::size_t> total;
  std::vector<std::size_t> reads;   // remote reads only
  std::vector<std::size_t> writes;  // every write is remote
  std::vector<std::vector<std::size_t>> per_passage;
  std::vector<std::vector<std::size_t>> passage_distinct_writes;
  std::vector<std::set<int>> written;  // physical registers written over the run

  std::size_t sum() const {
    std::size_t s = 0;
    for (auto t : total) s += t;
    return s;
  }
};

/// A read is remote when the reader holds no valid copy of the register; a
/// write is always remote, leaves the writer with a valid copy and
/// invalidates everyone else's.
inline RmrReport rmr_count(const Run& run) {
  replay(run);
  const std::size_t n = run.procs.size();
  const int m = run.registers();
  RmrReport rep;
  rep.procs = run.procs;
  rep.total.assign(n, 0);
  rep.reads.assign(n, 0);
  rep.writes.assign(n, 0);
  rep.per_passage.assign(n, {});
  rep.passage_distinct_writes.assign(n, {});
  rep.written.assign(n, {});
  std::vector<std::vector<bool>> valid(n, std::vector<bool>(m + 1, false));
  std::vector<bool> open(n, false);
  std::vector<std::set<int>> passage_writes(n);

  for (const Event& e : run.events) {
    const std::size_t p = static_cast<std::size_t>(run.index_of(e.actor));
    if (!open[p]) {
      rep.per_passage[p].push_back(0);
      rep.passage_distinct_writes[p].push_back(0);
      passage_writes[p].clear();
      open[p] = true;
    }
    bool remote = false;
    if (e.is_read()) {
      remote = !valid[p][e.physical];
      valid[p][e.physical] = true;
      if (remote) ++rep.reads[p];
    } else if (e.is_write()) {
      remote = true;
      for (std::size_t q = 0; q < n; ++q) valid[q][e.physical] = q == p;
      ++rep.writes[p];
      rep.written[p].insert(e.physical);
      passage_writes[p].insert(e.physical);
      rep.passage_distinct_writes[p].back() = passage_writes[p].size();
    }
    if (remote) {
      ++rep.total[p];
      ++rep.per_passage[p].back();
    }
    if (e.kind == EventKind::EnterRemainder) open[p] = false;
  }
  return rep;
}

}  // namespace anonmutex
