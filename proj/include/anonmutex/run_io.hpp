#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "anonmutex/error.hpp"
#include "anonmutex/run.hpp"

namespace anonmutex {

/// A run plus, optionally, the program name each process executes.
struct Trace {
  Run run;
  std::vector<std::string> programs;  // parallel to run.procs; may be empty
};

inline std::string event_line(std::size_t step, const Event& e) {
  std::ostringstream out;
  out << step << '\t' << e.actor.token() << '\t' << to_string(e.kind) << '\t';
  if (e.is_access())
    out << e.logical << '\t' << e.physical << '\t' << to_token(e.value);
  else
    out << "-\t-\t-";
  return out.str();
}

/// Header lines (`m`, `assign`, optional `init` and `program`), then one
/// tab-separated line per event.
inline void write_trace(std::ostream& out, const Run& run, const std::vector<std::string>& programs = {}) {
  out << "m " << run.registers() << '\n';
  bool all_free = true;
  for (const auto& v : run.initial.values()) all_free = all_free && v.is_free();
  if (!all_free) {
    out << "init";
    for (const auto& v : run.initial.values()) out << ' ' << to_token(v);
    out << '\n';
  }
  for (std::size_t i = 0; i < run.procs.size(); ++i) {
    out << "assign " << run.procs[i].token() << ' ' << to_string(run.assignments[i]) << '\n';
    if (i < programs.size()) out << "program " << run.procs[i].token() << ' ' << programs[i] << '\n';
  }
  for (std::size_t i = 0; i < run.events.size(); ++i) out << event_line(i, run.events[i]) << '\n';
}

inline std::string trace_string(const Run& run, const std::vector<std::string>& programs = {}) {
  std::ostringstream out;
  write_trace(out, run, programs);
  return out.str();
}

namespace detail {

inline int parse_int(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": expected an integer, got '" + s + "'");
}

inline ProcessId parse_id(const std::string& s, int line) {
  int v = parse_int(s, line);
  if (v <= 0) throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": process ids are positive");
  return ProcessId(static_cast<std::uint32_t>(v));
}

inline EventKind parse_event_kind(const std::string& s, int line) {
  for (EventKind k : {EventKind::Read, EventKind::Write, EventKind::EnterCS, EventKind::ExitCS, EventKind::EnterRemainder})
    if (s == to_string(k)) return k;
  throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": unknown event kind '" + s + "'");
}

}  // namespace detail

inline Trace read_trace(std::istream& in) {
  Trace t;
  int m = 0;
  std::string text;
  int line = 0;
  std::vector<std::string> init;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty() || text[0] == '#') continue;
    std::istringstream ls(text);
    if (text.find('\t') != std::string::npos) {
      std::vector<std::string> f;
      std::string field;
      while (std::getline(ls, field, '\t')) f.push_back(field);
      if (f.size() != 6) throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": expected 6 fields");
      if (detail::parse_int(f[0], line) != static_cast<int>(t.run.events.size()))
        throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": step index out of sequence");
      Event e;
      e.actor = detail::parse_id(f[1], line);
      e.kind = detail::parse_event_kind(f[2], line);
      if (e.is_access()) {
        e.logical = detail::parse_int(f[3], line);
        e.physical = detail::parse_int(f[4], line);
        e.value = value_from_token(f[5]);
      }
      t.run.events.push_back(e);
      continue;
    }
    std::string key;
    ls >> key;
    if (key == "m") {
      std::string v;
      ls >> v;
      m = detail::parse_int(v, line);
    } else if (key == "init") {
      std::string tok;
      while (ls >> tok) init.push_back(tok);
    } else if (key == "assign") {
      std::string id;
      ls >> id;
      std::vector<int> table;
      std::string v;
      while (ls >> v) table.push_back(detail::parse_int(v, line));
      t.run.procs.push_back(detail::parse_id(id, line));
      t.run.assignments.emplace_back(std::move(table));
    } else if (key == "program") {
      std::string id, name;
      ls >> id >> name;
      ProcessId pid = detail::parse_id(id, line);
      if (t.run.procs.empty() || !(t.run.procs.back() == pid))
        throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": program must follow its assign line");
      t.programs.resize(t.run.procs.size());
      t.programs.back() = name;
    } else {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": unknown header '" + key + "'");
    }
  }
  if (m < 1) throw Error(ErrorKind::Parse, "missing register count");
  if (init.empty()) {
    t.run.initial = new_memory(m);
  } else {
    if (static_cast<int>(init.size()) != m) throw Error(ErrorKind::Parse, "init line does not list m values");
    std::vector<RegisterValue> vals;
    for (const auto& tok : init) vals.push_back(value_from_token(tok));
    t.run.initial = MemoryState(std::move(vals));
  }
  if (!t.programs.empty()) t.programs.resize(t.run.procs.size());
  return t;
}

inline Trace parse_trace(const std::string& text) {
  std::istringstream in(text);
  return read_trace(in);
}

}  // namespace anonmutex
