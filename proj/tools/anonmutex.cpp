// Command-line driver: model checking, scenario replay, adversaries, RMR
// counts and fuzzing. Reports are tab-separated key=value lines.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "anonmutex/adversary/hiding.hpp"
#include "anonmutex/adversary/lockstep.hpp"
#include "anonmutex/checker/campaign.hpp"
#include "anonmutex/checker/fuzz.hpp"
#include "anonmutex/checker/rmr.hpp"
#include "anonmutex/registry.hpp"
#include "anonmutex/run_io.hpp"
#include "anonmutex/scenario.hpp"

using namespace anonmutex;

namespace {

constexpr int kOk = 0;
constexpr int kViolated = 1;
constexpr int kInconclusive = 2;
constexpr int kUsage = 64;

struct Common {
  std::string program = "fig1";
  std::string variant;
  int m = 7;
  int procs = 2;
  bool allow_invalid_m = false;
  unsigned workers = 1;
  std::string out;
  std::string witness;
};

std::string resolved_name(const Common& c) {
  if (c.variant.empty() || c.variant == "standard") return c.program;
  if (c.program != "fig1") throw Error(ErrorKind::InvalidConfiguration, "--variant applies to fig1 only");
  if (c.variant == "no-gate") return "fig1-no-gate";
  if (c.variant == "one-reserved") return "fig1-one-reserved";
  throw Error(ErrorKind::InvalidConfiguration, "unknown variant '" + c.variant + "'");
}

std::vector<ProgramPtr> build(const Common& c, int count) {
  return std::vector<ProgramPtr>(count, make_program(resolved_name(c), c.m, c.allow_invalid_m));
}

void write_file(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  f << text;
}

void emit_run(const Common& c, const Run& run, const std::string& name, const std::string& expectation,
              std::vector<std::string> programs = {}) {
  if (programs.empty()) programs.assign(run.procs.size(), resolved_name(c));
  write_file(c.out, trace_string(run, programs));
  write_file(c.witness, scenario_text(run, programs, name, expectation));
}

std::string bits(const std::vector<bool>& v) {
  std::string s;
  for (bool b : v) s += b ? '1' : '0';
  return s;
}

std::string set_text(const std::set<int>& s) {
  std::string out;
  for (int r : s) out += (out.empty() ? "" : ",") + std::to_string(r);
  return out.empty() ? "-" : out;
}

std::string ids_text(const std::vector<ProcessId>& v) {
  std::string out;
  for (ProcessId p : v) out += (out.empty() ? "" : ",") + std::to_string(p.token());
  return out.empty() ? "-" : out;
}

int cmd_check(const Common& c, const std::string& perm, std::size_t max_states, std::size_t max_depth) {
  CheckRequest req;
  req.programs = build(c, c.procs);
  req.m = c.m;
  req.permutations = parse_permutation_spec(perm);
  req.limits.max_states = max_states;
  req.limits.max_depth = max_depth;
  req.workers = c.workers;
  const CheckResult res = check_programs(req);
  int code = kOk;
  const Witness* first = nullptr;
  for (const PropertyReport& r : res.reports) {
    std::cout << "property=" << to_string(r.property) << "\tverdict=" << to_string(r.verdict)
              << "\tstates=" << r.states_visited << "\tpermutations=" << r.permutations_covered;
    if (r.witness)
      std::cout << "\twitness=" << to_string(r.witness->kind) << "\tevents=" << r.witness->run.size()
                << "\tprocesses=" << ids_text(r.witness->processes);
    if (r.property == Property::Memoryless) std::cout << "\tquiescent=" << r.quiescent.size();
    if (!r.reason.empty()) std::cout << "\treason=" << r.reason;
    std::cout << "\n";
    if (r.verdict == Verdict::Violated) {
      code = kViolated;
      if (!first) first = &*r.witness;
    } else if (r.verdict == Verdict::Inconclusive && code == kOk) {
      code = kInconclusive;
    }
  }
  if (first)
    emit_run(c, first->run, std::string("check-") + to_string(first->kind),
             first->kind == WitnessKind::MutexViolation ? "mutex-violated" : "");
  return code;
}

bool looks_like_trace(const std::string& text) { return text.find('\t') != std::string::npos; }

int cmd_scenario(const Common& c, const std::string& path, const std::string& override_program) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot read '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();

  if (looks_like_trace(text)) {
    const Trace t = parse_trace(text);
    GlobalState end = replay(t.run);
    if (t.programs.size() == t.run.procs.size()) {
      std::vector<System::Member> members;
      for (std::size_t i = 0; i < t.programs.size(); ++i)
        members.push_back({t.run.procs[i], make_program(t.programs[i], t.run.registers(), true), t.run.assignments[i]});
      end = System(t.run.registers(), std::move(members)).replay(t.run);
    }
    std::cout << "trace=" << path << "\tevents=" << t.run.size() << "\tin_critical=" << end.in_critical() << "\n";
    write_file(c.out, trace_string(t.run, t.programs));
    return kOk;
  }

  const Scenario sc = parse_scenario(text);
  const ScenarioResult r = replay_scenario(sc, override_program);
  std::cout << "scenario=" << r.name << "\tevents=" << r.run.size()
            << "\tmutex=" << (r.violation_seen ? "violated" : "holds");
  if (r.violation_seen) std::cout << "\tprocesses=" << ids_text(r.violators);
  std::cout << "\n";
  if (r.diverged)
    std::cout << "divergence\tstep=" << r.divergence_directive + 1 << "\tline=" << r.divergence_line << "\t"
              << r.divergence << "\n";
  for (const auto& chk : r.checks)
    std::cout << "expect=" << chk.text << "\tmet=" << (chk.met ? "yes" : "no") << "\t" << chk.detail << "\n";
  write_file(c.out, trace_string(r.run, r.programs));
  write_file(c.witness, scenario_text(r.run, r.programs, r.name, r.violation_seen ? "mutex-violated" : ""));
  return r.ok() ? kOk : kViolated;
}

int cmd_lockstep(const Common& c, std::size_t step_cap) {
  if (c.m % 2 == 0) throw Error(ErrorKind::InvalidArgument, "lockstep needs an odd m; use even-m");
  const SymmetricRunResult r = lockstep_construct(build(c, 1)[0], c.m, step_cap);
  std::cout << "lockstep\tm=" << c.m << "\tevents=" << r.run.size() << "\tsymmetric_events=" << r.symmetric_length
            << "\tcase4_swaps=" << r.case4_swaps << "\n";
  std::cout << "pi_p=" << to_string(r.pi_p) << "\tpi_q=" << to_string(r.pi_q) << "\n";
  std::set<int> all = r.writes_p;
  all.insert(r.writes_q.begin(), r.writes_q.end());
  std::cout << "writes_p=" << r.writes_p.size() << "\twrites_q=" << r.writes_q.size() << "\tunion=" << all.size()
            << "\tregisters_p=" << set_text(r.writes_p) << "\tregisters_q=" << set_text(r.writes_q) << "\n";
  std::cout << "cs_entries=" << r.cs_entries_p << "," << r.cs_entries_q << "\tcs_exits=" << r.cs_exits_p << ","
            << r.cs_exits_q << "\tfinal_equals_initial=" << (r.final_state.memory == new_memory(c.m) ? "yes" : "no")
            << "\n";
  std::cout << "checkpoints=" << bits(r.checkpoints) << "\n";
  emit_run(c, r.run, "lockstep", "no-violation");
  return kOk;
}

int cmd_even_m(const Common& c, std::size_t step_cap) {
  if (c.m % 2 != 0) throw Error(ErrorKind::InvalidArgument, "even-m needs an even m; use lockstep");
  const EvenMResult r = even_m_drive(build(c, 1)[0], c.m, step_cap);
  std::cout << "even-m\tm=" << c.m << "\toutcome=" << to_string(r.outcome) << "\tevents=" << r.run.size();
  if (r.witness)
    std::cout << "\tprefix=" << r.witness->prefix_length << "\tcycle=" << r.witness->cycle_length;
  if (!r.reason.empty()) std::cout << "\treason=" << r.reason;
  std::cout << "\n";
  std::cout << "checkpoints=" << bits(r.checkpoints) << "\n";
  const Run& run = r.witness ? r.witness->run : r.run;
  emit_run(c, run, "even-m", r.outcome == EvenMOutcome::MutexViolation ? "mutex-violated" : "");
  switch (r.outcome) {
    case EvenMOutcome::DeadlockCycle: return kOk;
    case EvenMOutcome::MutexViolation: return kViolated;
    case EvenMOutcome::Inconclusive: return kInconclusive;
  }
  return kViolated;
}

int cmd_hiding(const Common& c, const std::string& q_program, std::size_t cycles, std::size_t step_cap) {
  if (c.m % 2 == 0) throw Error(ErrorKind::InvalidArgument, "hiding needs an odd m");
  auto programs = build(c, 3);
  if (!q_program.empty()) programs[2] = make_program(q_program, c.m, c.allow_invalid_m);
  const HidingReport r = hiding_drive(programs, ProcessId(1), ProcessId(2), ProcessId(3), c.m, cycles, step_cap);
  std::cout << "hiding\tm=" << c.m << "\tcycles=" << r.cycles_completed << "\toutcome=" << to_string(r.outcome)
            << "\tevents=" << r.run.size();
  if (r.violation)
    std::cout << "\tviolation_events=" << r.violation->size() << "\tprocesses=" << ids_text(r.violation_processes);
  std::cout << "\n";
  for (std::size_t i = 0; i < r.cycles.size(); ++i) {
    const HidingCycle& h = r.cycles[i];
    std::cout << "cycle=" << i + 1 << "\tpair=" << h.pair << "\tq_register=" << h.q_register
              << "\thidden=" << (h.hidden ? "yes" : "no") << "\tlooks_erased=" << (h.looks_erased ? "yes" : "no")
              << "\n";
  }
  std::vector<std::string> names(3, resolved_name(c));
  if (!q_program.empty()) names[2] = q_program;
  if (r.violation)
    emit_run(c, *r.violation, "hiding", "mutex-violated", names);
  else
    emit_run(c, r.run, "hiding", "", names);
  return kOk;
}

void print_rmr(const RmrReport& r) {
  std::cout << "total=" << r.sum() << "\n";
  for (std::size_t i = 0; i < r.procs.size(); ++i) {
    std::cout << "process=" << r.procs[i].token() << "\trmr=" << r.total[i] << "\treads=" << r.reads[i]
              << "\twrites=" << r.writes[i] << "\tdistinct_writes=" << r.written[i].size() << "\tpassages=";
    std::string ps;
    for (auto n : r.per_passage[i]) ps += (ps.empty() ? "" : ",") + std::to_string(n);
    std::cout << (ps.empty() ? "-" : ps) << "\n";
  }
}

int cmd_rmr(const Common& c, const std::string& mode, std::size_t step_cap) {
  if (mode == "solo") {
    const SoloResult s = run_solo(build(c, 1)[0], ProcessId(1), new_memory(c.m), NamingAssignment::identity(c.m), step_cap);
    std::cout << "rmr\tmode=solo\tm=" << c.m << "\tevents=" << s.run.size()
              << "\tcompleted=" << (s.completed ? "yes" : "no") << "\n";
    print_rmr(rmr_count(s.run));
    emit_run(c, s.run, "rmr-solo", "");
    return s.completed ? kOk : kInconclusive;
  }
  if (c.m % 2 == 0) throw Error(ErrorKind::InvalidArgument, "contended mode needs an odd m");
  const SymmetricRunResult r = lockstep_construct(build(c, 1)[0], c.m, step_cap);
  std::cout << "rmr\tmode=contended\tm=" << c.m << "\tevents=" << r.run.size()
            << "\tdistinct_writes_p=" << r.writes_p.size() << "\tdistinct_writes_q=" << r.writes_q.size() << "\n";
  print_rmr(rmr_count(r.run));
  emit_run(c, r.run, "rmr-contended", "");
  return kOk;
}

int cmd_fuzz(const Common& c, const std::string& perm, std::size_t schedules, std::size_t steps, std::uint64_t seed) {
  FuzzConfig cfg;
  cfg.programs = build(c, c.procs);
  cfg.m = c.m;
  cfg.permutations = parse_permutation_spec(perm);
  cfg.schedules = schedules;
  cfg.steps = steps;
  cfg.seed = seed;
  cfg.workers = c.workers;
  const FuzzReport r = fuzz_schedules(cfg);
  std::cout << "fuzz\tm=" << c.m << "\tschedules=" << r.schedules << "\tsteps=" << r.steps
            << "\tpermutations=" << r.permutations_covered << "\tmutex_violations=" << r.mutex_violations
            << "\tmemoryless_breaches=" << r.memoryless_breaches << "\tprogress_flags=" << r.progress_flags << "\n";
  for (const auto* f : {&r.first_mutex, &r.first_breach, &r.first_flag})
    if (*f)
      std::cout << "finding=" << to_string((*f)->outcome) << "\tschedule=" << (*f)->schedule
                << "\tevents=" << (*f)->run.size() << "\tprocesses=" << ids_text((*f)->processes) << "\n";
  const auto& first = r.first_mutex ? r.first_mutex : r.first_breach ? r.first_breach : r.first_flag;
  if (first) emit_run(c, first->run, "fuzz", first->outcome == FuzzOutcome::MutexViolation ? "mutex-violated" : "");
  return r.clean() ? kOk : kViolated;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anonymous-register mutual exclusion: checking, replay and adversaries"};
  app.require_subcommand(1);
  Common c;
  std::string perm = "fixed";
  std::size_t max_states = ExplorationLimits{}.max_states;
  std::size_t max_depth = ExplorationLimits{}.max_depth;
  std::size_t schedules = 10'000, steps = 10'000, cycles = 10, step_cap = 100'000;
  std::uint64_t seed = 1;
  std::string scenario_path, mode = "solo", override_program, q_program;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--program", c.program, "program name")->check(CLI::IsMember(program_names()));
    sub->add_option("--variant", c.variant, "fig1 variant: standard, no-gate, one-reserved");
    sub->add_option("--m", c.m, "register count");
    sub->add_flag("--allow-invalid-m", c.allow_invalid_m, "accept m outside the supported range");
    sub->add_option("--workers", c.workers, "worker threads");
    sub->add_option("--out", c.out, "trace output path");
    sub->add_option("--witness", c.witness, "write the run as a replayable scenario");
  };

  auto* check = app.add_subcommand("check", "explore the state graph and check all properties");
  common(check);
  check->add_option("--procs", c.procs, "process count")->check(CLI::Range(1, 4));
  check->add_option("--perm", perm, "fixed | enumerate | sample:N:seedS");
  check->add_option("--max-states", max_states, "state cap per assignment");
  check->add_option("--max-depth", max_depth, "depth cap");

  auto* scenario = app.add_subcommand("scenario", "replay a scenario or trace file");
  common(scenario);
  scenario->add_option("file", scenario_path, "scenario or trace file")->required();
  scenario->add_option("--override", override_program, "run every process with this program instead")
      ->check(CLI::IsMember(program_names()));

  auto* adversary = app.add_subcommand("adversary", "run an adversary construction");
  adversary->require_subcommand(1);
  auto* lockstep = adversary->add_subcommand("lockstep", "symmetric two-process construction, odd m");
  auto* even = adversary->add_subcommand("even-m", "symmetric drive, even m");
  auto* hiding = adversary->add_subcommand("hiding", "hide a third process, odd m");
  for (auto* s : {lockstep, even, hiding}) {
    common(s);
    s->add_option("--step-cap", step_cap, "step cap");
  }
  hiding->add_option("--cycles", cycles, "cycle count");
  hiding->add_option("--q-program", q_program, "program of the hidden process")->check(CLI::IsMember(program_names()));

  auto* rmr = app.add_subcommand("rmr", "count remote memory references");
  common(rmr);
  rmr->add_option("--mode", mode, "solo | contended")->check(CLI::IsMember({"solo", "contended"}));
  rmr->add_option("--step-cap", step_cap, "step cap");

  auto* fuzz = app.add_subcommand("fuzz", "random fair schedules");
  common(fuzz);
  std::string fuzz_perm = "sample:64:seed42";
  fuzz->add_option("--procs", c.procs, "process count")->check(CLI::Range(1, 8));
  fuzz->add_option("--perm", fuzz_perm, "fixed | enumerate | sample:N:seedS");
  fuzz->add_option("--schedules", schedules, "schedule count");
  fuzz->add_option("--steps", steps, "steps per schedule");
  fuzz->add_option("--seed", seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*check) return cmd_check(c, perm, max_states, max_depth);
    if (*scenario) return cmd_scenario(c, scenario_path, override_program);
    if (*lockstep) return cmd_lockstep(c, step_cap);
    if (*even) return cmd_even_m(c, step_cap);
    if (*hiding) return cmd_hiding(c, q_program, cycles, step_cap);
    if (*rmr) return cmd_rmr(c, mode, step_cap);
    if (*fuzz) return cmd_fuzz(c, fuzz_perm, schedules, steps, seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::InvalidConfiguration:
      case ErrorKind::InvalidArgument:
      case ErrorKind::Parse: return kUsage;
      default: return kViolated;
    }
  }
  return kUsage;
}
