#include <fmt/core.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "priml/correspond.hpp"
#include "priml/elaborate.hpp"
#include "priml/eval.hpp"
#include "priml/parser.hpp"
#include "priml/pretty.hpp"
#include "priml/schedule.hpp"

namespace {

using namespace priml;

constexpr int kExitDiag = 1;
constexpr int kExitIo = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitFuel = 4;

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errcode::Io, fmt::format("cannot open {}", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Nat> read_inputs(const std::string &path) {
  std::vector<Nat> out;
  if (path.empty()) return out;
  std::istringstream in(read_file(path));
  std::string word;
  while (in >> word) {
    try {
      out.emplace_back(word);
    } catch (const std::exception &) {
      fail(errcode::Io, fmt::format("bad natural '{}' in {}", word, path));
    }
  }
  return out;
}

int exit_code_for(const Diagnostic &d) {
  if (d.code == errcode::Io || d.code == errcode::BadDag) return kExitIo;
  if (d.code == errcode::Stuck || d.code == errcode::Deadlock ||
      d.code == errcode::Audit)
    return kExitRuntime;
  if (d.code == errcode::Fuel) return kExitFuel;
  return kExitDiag;
}

int64_t fuel_from_env() {
  const char *env = std::getenv("PRIML_FUEL");
  if (!env) return 10'000'000;
  return std::strtoll(env, nullptr, 10);
}

struct Checked {
  ElabResult elab;
};

Checked check_file(const std::string &path) {
  SProgram prog = parse(read_file(path));
  Checked out{elab_program(prog)};
  // Elaboration correctness: the produced command typechecks at bot.
  TypeContext ctx;
  Signature sig;
  type_cmd(out.elab.store, sig, ctx, out.elab.main, prio_bot());
  return out;
}

int cmd_check(const std::string &path, bool dump_core, bool dump_types,
              bool dump_order) {
  Checked c = check_file(path);
  if (dump_order) {
    for (Ident p : c.elab.store.consts())
      fmt::print("prio {}\n", str(p));
    for (const auto &[lo, hi] : c.elab.store.edges())
      fmt::print("ord {} {}\n", str(lo), str(hi));
    std::string total;
    for (Ident p : c.elab.store.total_order()) {
      if (!total.empty()) total += " ";
      total += str(p);
    }
    fmt::print("total {}\n", total);
  }
  if (dump_types)
    for (const auto &[name, type] : c.elab.bindings)
      fmt::print("{} : {}\n", str(name), show(type));
  if (dump_core) fmt::print("{}\n", show(c.elab.main));
  return 0;
}

int cmd_run(const std::string &path, RunOptions opts, bool stats,
            const std::string &trace_path) {
  Checked c = check_file(path);
  RunResult r = run(c.elab.store, c.elab.main, c.elab.main_type, opts);
  for (const Nat &n : r.output_log) fmt::print("{}\n", n.str());
  if (r.input_underflow)
    fmt::print(stderr, "warning: input read past the end of the queue\n");
  if (stats) {
    fmt::print("value {}\n", show(r.value));
    fmt::print("steps {}\n", r.global_steps);
    for (const auto &st : r.stats) {
      if (st.finished)
        fmt::print("thread {} prio {} T {} vertices {}\n", str(st.id),
                   str(st.prio.name), st.response_time(), st.transitions);
      else
        fmt::print("thread {} prio {} unfinished vertices {}\n", str(st.id),
                   str(st.prio.name), st.transitions);
    }
  }
  if (!trace_path.empty()) {
    std::ofstream out(trace_path, std::ios::binary);
    if (!out) fail(errcode::Io, fmt::format("cannot write {}", trace_path));
    out << format_trace(r);
  }
  return 0;
}

int cmd_cost(const std::string &path, const std::string &thread, int procs,
             const std::string &emit, bool check_wf,
             const std::string &input_path) {
  Checked c = check_file(path);
  CostOptions copts;
  copts.fuel = fuel_from_env();
  copts.inputs = read_inputs(input_path);
  CostResult cost = cost_program(c.elab.store, c.elab.main, copts,
                                 intern("main"));
  if (!cost.dag.aux_edges.empty())
    fail(errcode::Audit, "auxiliary edge set is expected to stay empty");
  if (!emit.empty()) {
    std::ofstream out(emit, std::ios::binary);
    if (!out) fail(errcode::Io, fmt::format("cannot write {}", emit));
    out << write_dag(c.elab.store, cost.dag);
  }
  if (check_wf) {
    WfWitness w;
    bool wf = check_well_formed(cost.dag, c.elab.store, &w);
    fmt::print("well-formed {}\n", wf);
    if (!wf) fmt::print("witness {}\n", w.reason);
    bool swf = check_strongly_well_formed(cost.dag, c.elab.store, &w);
    fmt::print("strongly-well-formed {}\n", swf);
    if (!swf) fmt::print("witness {}\n", w.reason);
  }
  Ident a = intern(thread);
  const CostDag::Thread *t = cost.dag.find(a);
  if (!t)
    fail(errcode::BadDag, fmt::format("no thread named {}", thread));
  CostDag comp = competitor_work(cost.dag, a);
  int64_t work = priority_work(comp, c.elab.store, t->prio.name);
  int64_t span = t->length == 0 ? 0 : a_span(comp, c.elab.store, a);
  fmt::print("value {}\n", show(cost.value));
  fmt::print("threads {}\n", cost.dag.threads.size());
  fmt::print("vertices {}\n", cost.dag.total_vertices());
  fmt::print("thread {} prio {} length {}\n", str(a), str(t->prio.name),
             t->length);
  fmt::print("competitor-vertices {}\n", comp.total_vertices());
  fmt::print("priority-work {}\n", work);
  fmt::print("a-span {}\n", span);
  fmt::print("bound {:.6g}\n",
             static_cast<double>(work) / procs + static_cast<double>(span));
  return 0;
}

FairnessCriterion parse_criterion(const std::string &text) {
  FairnessCriterion c;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    size_t eq = part.find('=');
    if (eq == std::string::npos)
      fail(errcode::Io,
           fmt::format("bad criterion entry '{}' (want name=weight)", part));
    try {
      c.weights.emplace_back(intern(part.substr(0, eq)),
                             std::stod(part.substr(eq + 1)));
    } catch (const std::exception &) {
      fail(errcode::Io, fmt::format("bad criterion weight in '{}'", part));
    }
  }
  c.validate();
  return c;
}

int cmd_sim(const std::string &dag_path, int procs, const std::string &policy,
            const std::string &criterion_text, int64_t trials, uint64_t seed,
            const std::string &bound_thread, const std::string &rho_prime,
            bool det) {
  DagFile file = parse_dag(read_file(dag_path));
  fmt::print("policy {}\n", policy);
  fmt::print("procs {}\n", procs);
  fmt::print("threads {}\n", file.dag.threads.size());
  fmt::print("vertices {}\n", file.dag.total_vertices());

  if (policy == "prompt") {
    Schedule s = prompt_schedule(file.dag, file.store, procs, seed, det);
    std::string why;
    fmt::print("steps {}\n", s.steps.size());
    fmt::print("valid {}\n", schedule_valid(s, file.dag, &why));
    fmt::print("greedy {}\n", schedule_greedy(s, file.dag));
    fmt::print("prompt {}\n", schedule_prompt(s, file.dag, file.store));
    for (const auto &t : file.dag.threads)
      fmt::print("thread {} T {}\n", str(t.name),
                 response_time(s, file.dag, t.name));
    if (!bound_thread.empty()) {
      BoundReport r =
          check_bound(file.dag, file.store, intern(bound_thread), procs, s);
      fmt::print("bound-thread {}\n", bound_thread);
      fmt::print("bound-response {}\n", r.response);
      fmt::print("bound-work {}\n", r.work);
      fmt::print("bound-span {}\n", r.span);
      fmt::print("bound-rhs {:.6g}\n", r.rhs());
      fmt::print("bound-well-formed {}\n", r.well_formed);
      fmt::print("bound-holds {}\n", r.holds);
    }
    return 0;
  }
  if (policy == "fair") {
    FairnessCriterion crit = parse_criterion(criterion_text);
    if (!bound_thread.empty()) {
      Ident a = intern(bound_thread);
      Ident rp = rho_prime.empty() ? file.dag.find(a)->prio.name
                                   : intern(rho_prime);
      FairReport r = check_fair_bound(file.dag, file.store, a, procs, crit,
                                      rp, trials, seed);
      fmt::print("bound-thread {}\n", bound_thread);
      fmt::print("rho-prime {}\n", str(rp));
      fmt::print("trials {}\n", r.trials);
      fmt::print("mass {:.6g}\n", r.mass);
      fmt::print("mean-response {:.6g}\n", r.mean_response);
      fmt::print("std-error {:.6g}\n", r.std_error);
      fmt::print("bound-rhs {:.6g}\n", r.rhs);
      fmt::print("bound-holds {}\n", r.holds);
      return 0;
    }
    // mean response per thread over the trials
    std::vector<double> sums(file.dag.threads.size(), 0.0);
    for (int64_t i = 0; i < trials; ++i) {
      Schedule s =
          fair_prompt_schedule(file.dag, file.store, procs, crit, seed + i);
      for (size_t k = 0; k < file.dag.threads.size(); ++k)
        sums[k] += static_cast<double>(
            response_time(s, file.dag, file.dag.threads[k].name));
    }
    fmt::print("trials {}\n", trials);
    for (size_t k = 0; k < file.dag.threads.size(); ++k)
      fmt::print("thread {} meanT {:.6g}\n", str(file.dag.threads[k].name),
                 sums[k] / static_cast<double>(trials));
    return 0;
  }
  fail(errcode::Io, fmt::format("unknown policy '{}'", policy));
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"PriML reference toolchain"};
  app.require_subcommand(1);

  std::string path, input_path, trace_path, emit_path, thread = "main";
  std::string dag_path, policy = "prompt", criterion, bound_thread, rho_prime;
  bool dump_core = false, dump_types = false, dump_order = false;
  bool stats = false, audit = false, join_all = false, check_wf = false;
  bool det = false;
  int procs = 1;
  int64_t trials = 100;
  uint64_t seed = 0;

  CLI::App *check = app.add_subcommand("check", "parse, elaborate, typecheck");
  check->add_option("path", path)->required();
  check->add_flag("--dump-core", dump_core);
  check->add_flag("--dump-types", dump_types);
  check->add_flag("--dump-order", dump_order);

  CLI::App *runc = app.add_subcommand("run", "evaluate on the simulated scheduler");
  runc->add_option("path", path)->required();
  runc->add_option("--procs", procs);
  runc->add_option("--seed", seed);
  runc->add_option("--input", input_path);
  runc->add_flag("--audit", audit);
  runc->add_flag("--join-all", join_all);
  runc->add_option("--trace", trace_path);
  runc->add_flag("--stats", stats);

  CLI::App *cost = app.add_subcommand("cost", "build and analyze the cost DAG");
  cost->add_option("path", path)->required();
  cost->add_option("--thread", thread);
  cost->add_option("--procs", procs);
  cost->add_option("--emit-dag", emit_path);
  cost->add_flag("--check-wf", check_wf);
  cost->add_option("--input", input_path);

  CLI::App *sim = app.add_subcommand("sim", "schedule a DAG file");
  sim->add_option("dagfile", dag_path)->required();
  sim->add_option("--procs", procs);
  sim->add_option("--policy", policy)->check(CLI::IsMember({"prompt", "fair"}));
  sim->add_option("--criterion", criterion);
  sim->add_option("--trials", trials);
  sim->add_option("--seed", seed);
  sim->add_option("--check-bound", bound_thread);
  sim->add_option("--rho-prime", rho_prime);
  sim->add_flag("--det", det);

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed())
      return cmd_check(path, dump_core, dump_types, dump_order);
    if (runc->parsed()) {
      RunOptions opts;
      opts.procs = procs;
      opts.seed = seed;
      opts.inputs = read_inputs(input_path);
      opts.audit = audit;
      opts.join_all = join_all;
      return cmd_run(path, opts, stats, trace_path);
    }
    if (cost->parsed())
      return cmd_cost(path, thread, procs, emit_path, check_wf, input_path);
    if (sim->parsed())
      return cmd_sim(dag_path, procs, policy, criterion, trials, seed,
                     bound_thread, rho_prime, det);
  } catch (const DiagnosticError &e) {
    fmt::print(stderr, "{}\n", e.diag.message);
    return exit_code_for(e.diag);
  } catch (const std::exception &e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitIo;
  }
  return 0;
}
