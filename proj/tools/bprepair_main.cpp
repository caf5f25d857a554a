// Command line driver: parse/verify/run/graph dumps, budget-iterating repair,
// concretization through a predicate map, and raw query emission.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bprepair/cfg.h"
#include "bprepair/concretize.h"
#include "bprepair/parser.h"
#include "bprepair/predmap.h"
#include "bprepair/printer.h"
#include "bprepair/report.h"
#include "bprepair/schemas.h"
#include "bprepair/semantics.h"
#include "bprepair/smtlib.h"
#include "bprepair/solve.h"
#include "bprepair/templates.h"

namespace {

constexpr int kOk = 0, kNoRepair = 2, kBadInput = 3, kSolverFailure = 4;

struct Options {
  std::string command;
  std::string program_path;
  int64_t budget = 1;
  bool budget_given = false;
  int64_t budget_cap = 8;
  std::string cost_model_path, predicate_map_path, template_path;
  std::string strategy = "expand";
  std::string solver_cmd;
  std::string out_dir = "out";
  int64_t oracle_depth = 8;
  bool strict_stuck = false;
};

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool write_file(const std::string& path, const std::string& content, std::string* err) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << content)) {
    if (err) *err = "cannot write '" + path + "'";
    return false;
  }
  return true;
}

int fail(const std::string& phase, const std::string& msg) {
  std::cerr << "bprepair: " << phase << ": " << msg << "\n";
  return kBadInput;
}

int fail_diags(const std::string& phase, const bp::DiagnosticSink& sink) {
  std::cerr << "bprepair: " << phase << " failed\n" << sink.format_all();
  return kBadInput;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Parsed program plus everything derived from it. The graph points into
// `program`; keep this object in place once loaded.
struct Job {
  bp::Program program;
  bp::TransitionGraph graph;
  std::vector<int> cutset;
  std::vector<bp::VerificationPath> paths;
  bp::CostModel cm;
  std::vector<std::pair<std::string, double>> timings;
};

// Fills `j`; returns an exit code on failure, -1 to continue.
int load_job(const Options& o, Job& j) {
  auto text = read_file(o.program_path);
  if (!text) return fail("read", "cannot read '" + o.program_path + "'");

  auto t0 = Clock::now();
  auto parsed = bp::parse_program(*text, o.program_path);
  if (!parsed.program) return fail_diags("parse", parsed.diags);
  j.program = std::move(*parsed.program);
  j.timings.emplace_back("parse", seconds_since(t0));

  t0 = Clock::now();
  bp::DiagnosticSink gsink;
  auto g = bp::build_graph(j.program, gsink, o.program_path);
  if (!g) return fail_diags("graph", gsink);
  j.graph = std::move(*g);
  j.cutset = bp::compute_cutset(j.graph);
  bp::DiagnosticSink psink;
  j.paths = bp::enumerate_verification_paths(j.graph, j.cutset, psink);
  if (psink.has_errors()) return fail_diags("paths", psink);
  j.timings.emplace_back("graph", seconds_since(t0));

  j.cm = bp::CostModel::defaults();
  if (!o.cost_model_path.empty()) {
    auto cs = read_file(o.cost_model_path);
    if (!cs) return fail("cost-model", "cannot read '" + o.cost_model_path + "'");
    bp::DiagnosticSink csink;
    auto cm = bp::load_cost_model(*cs, o.cost_model_path, csink);
    if (!cm) return fail_diags("cost-model", csink);
    j.cm = std::move(*cm);
  }
  return -1;
}

// --budget wins; otherwise a budget pinned in the cost model file; otherwise
// the flag's default.
int64_t initial_budget(const Options& o, const bp::CostModel& cm) {
  if (!o.budget_given && cm.budget) return *cm.budget;
  return o.budget;
}

int make_solve_options(const Options& o, int64_t initial, bp::SolveOptions& s) {
  s.initial_budget = initial;
  s.budget_cap = std::max(initial, o.budget_cap);
  s.exec.max_stack = static_cast<size_t>(o.oracle_depth);
  s.exec.strict_stuck = o.strict_stuck;
  if (o.strategy == "external") {
    if (o.solver_cmd.empty())
      return fail("config", "the external strategy requires --solver-cmd");
    s.strategy = bp::SolveOptions::Strategy::External;
    s.solver_cmd = o.solver_cmd;
    s.script_dir = o.out_dir;  // keep scripts next to the reports
  }
  return -1;
}

int ensure_out_dir(const Options& o) {
  std::error_code ec;
  std::filesystem::create_directories(o.out_dir, ec);
  if (ec) return fail("out", "cannot create '" + o.out_dir + "': " + ec.message());
  return -1;
}

// Writes report.json/report.txt, echoes the text form, returns `code`.
int finish(bp::ReportInputs& in, const Options& o, const Job& j, int code) {
  in.command = o.command;
  in.program = o.program_path;
  in.timings = j.timings;
  in.artifacts.emplace_back("report", o.out_dir + "/report.json");
  std::string err;
  if (!bp::write_report(in, o.out_dir, &err)) return fail("out", err);
  std::cout << bp::report_text(in);
  return code;
}

std::string stmt_summary(const bp::Statement& s) {
  if (s.kind == bp::StmtKind::If)
    return "if (" + bp::expr_to_string(s.guard) + ") then ... fi";
  if (s.kind == bp::StmtKind::While)
    return "while (" + bp::expr_to_string(s.guard) + ") do ... od";
  return bp::print_statement(s);
}

// Statement-level diff; repair preserves program shape, so the two walks are
// aligned. Branch statements diff on their guard line only.
std::string make_diff(const bp::Program& before, const bp::Program& after) {
  std::vector<const bp::LabeledStatement*> a, b;
  bp::for_each_statement(before, [&](const bp::LabeledStatement& s) { a.push_back(&s); });
  bp::for_each_statement(after, [&](const bp::LabeledStatement& s) { b.push_back(&s); });
  std::string out;
  for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
    std::string sa = stmt_summary(a[i]->stmt), sb = stmt_summary(b[i]->stmt);
    if (sa == sb) continue;
    out += "@ " + a[i]->label + "\n- " + sa + "\n+ " + sb + "\n";
  }
  return out.empty() ? "no changes\n" : out;
}

const char* status_verdict(const bp::RepairResult& r) {
  switch (r.status) {
    case bp::RepairResult::Status::Repaired: return "repaired";
    case bp::RepairResult::Status::Unrepairable: return "unrepairable";
    case bp::RepairResult::Status::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

int status_code(const bp::RepairResult& r) {
  if (r.solver_failure) return kSolverFailure;
  return r.status == bp::RepairResult::Status::Repaired ? kOk : kNoRepair;
}

int cmd_graph(const Options& o, Job& j) {
  int rc = ensure_out_dir(o);
  if (rc >= 0) return rc;
  std::string err;
  if (!write_file(o.out_dir + "/graph.dot", j.graph.dot(), &err)) return fail("out", err);

  bp::ReportInputs in;
  in.graph = &j.graph;
  in.verdict = "ok";
  std::string cuts;
  for (int n : j.cutset) cuts += (cuts.empty() ? "" : " ") + j.graph.nodes[n].name;
  in.info = {{"nodes", std::to_string(j.graph.nodes.size())},
             {"edges", std::to_string(j.graph.edges.size())},
             {"cutpoints", cuts},
             {"verification_paths", std::to_string(j.paths.size())}};
  in.artifacts.emplace_back("dot", o.out_dir + "/graph.dot");
  return finish(in, o, j, kOk);
}

int cmd_run(const Options& o, Job& j) {
  bp::ExecOptions ex;
  ex.max_stack = static_cast<size_t>(o.oracle_depth);
  ex.strict_stuck = o.strict_stuck;
  auto t0 = Clock::now();
  bp::Verdict v = bp::check_partial_correctness(j.graph, ex);
  j.timings.emplace_back("explore", seconds_since(t0));

  bp::ReportInputs in;
  in.graph = &j.graph;
  in.exec = &v;
  in.verdict = bp::verdict_kind_name(v.kind);
  int code = v.kind == bp::VerdictKind::PartiallyCorrect ? kOk : kNoRepair;
  return finish(in, o, j, code);
}

// Solve with every location pinned to identity: succeeds exactly when the
// program as written has an inductive proof.
int cmd_verify(const Options& o, Job& j) {
  bp::SolveOptions s;
  int rc = make_solve_options(o, 0, s);
  if (rc >= 0) return rc;
  s.budget_cap = 0;

  bp::DiagnosticSink sink;
  bp::RepairResult res = bp::solve_repair(j.graph, j.cutset, j.paths, j.cm, s, sink);
  double enc = 0, sol = 0;
  for (const auto& a : res.attempts) enc += a.encode_seconds, sol += a.solve_seconds;
  j.timings.emplace_back("query_generation", enc);
  j.timings.emplace_back("solve", sol);

  bp::ReportInputs in;
  in.graph = &j.graph;
  in.repair = &res;
  bp::Verdict witness;
  if (res.status == bp::RepairResult::Status::Repaired) {
    in.verdict = "verified";
    in.message = "every assertion holds; the report carries the proof";
  } else if (res.solver_failure) {
    in.verdict = "inconclusive";
    in.message = res.message;
  } else {
    in.verdict = "not verified";
    in.message = "no inductive proof exists";
    bp::ExecOptions ex;
    ex.max_stack = static_cast<size_t>(o.oracle_depth);
    ex.strict_stuck = o.strict_stuck;
    witness = bp::check_partial_correctness(j.graph, ex);
    in.exec = &witness;
  }
  int code = res.solver_failure                                   ? kSolverFailure
             : res.status == bp::RepairResult::Status::Repaired ? kOk
                                                                : kNoRepair;
  return finish(in, o, j, code);
}

// Shared by repair and concretize. Returns an exit code, filling `res` and
// recording artifacts for a successful rewrite.
int run_repair(const Options& o, Job& j, bp::RepairResult& res, bp::ReportInputs& in) {
  int rc = ensure_out_dir(o);
  if (rc >= 0) return rc;
  bp::SolveOptions s;
  rc = make_solve_options(o, initial_budget(o, j.cm), s);
  if (rc >= 0) return rc;

  bp::DiagnosticSink sink;
  res = bp::solve_repair(j.graph, j.cutset, j.paths, j.cm, s, sink);
  double enc = 0, sol = 0;
  for (const auto& a : res.attempts) enc += a.encode_seconds, sol += a.solve_seconds;
  j.timings.emplace_back("query_generation", enc);
  j.timings.emplace_back("solve", sol);

  in.graph = &j.graph;
  in.repair = &res;
  in.verdict = status_verdict(res);
  in.message = res.message;
  in.info.emplace_back("strategy", o.strategy);

  if (res.repaired) {
    std::string err;
    if (!write_file(o.out_dir + "/repaired.bp", bp::print_program(*res.repaired), &err))
      return fail("out", err);
    if (!write_file(o.out_dir + "/diff.txt", make_diff(j.program, *res.repaired), &err))
      return fail("out", err);
    in.artifacts.emplace_back("repaired", o.out_dir + "/repaired.bp");
    in.artifacts.emplace_back("diff", o.out_dir + "/diff.txt");
  }
  return -1;
}

int cmd_repair(const Options& o, Job& j) {
  bp::RepairResult res;
  bp::ReportInputs in;
  int rc = run_repair(o, j, res, in);
  if (rc >= 0) return rc;
  return finish(in, o, j, status_code(res));
}

int cmd_concretize(const Options& o, Job& j) {
  if (o.predicate_map_path.empty())
    return fail("config", "concretize requires --predicate-map");
  auto ptext = read_file(o.predicate_map_path);
  if (!ptext) return fail("predicate-map", "cannot read '" + o.predicate_map_path + "'");
  bp::DiagnosticSink msink;
  auto pm = bp::load_predicate_map(*ptext, o.predicate_map_path, msink);
  if (!pm) return fail_diags("predicate-map", msink);

  std::optional<bp::TemplateAssignment> ta;
  if (!o.template_path.empty()) {
    auto ttext = read_file(o.template_path);
    if (!ttext) return fail("template", "cannot read '" + o.template_path + "'");
    bp::DiagnosticSink tsink;
    ta = bp::load_template_assignment(*ttext, o.template_path, tsink);
    if (!ta) return fail_diags("template", tsink);
  }

  bp::RepairResult res;
  bp::ReportInputs in;
  int rc = run_repair(o, j, res, in);
  if (rc >= 0) return rc;
  if (!res.repaired) return finish(in, o, j, status_code(res));

  auto t0 = Clock::now();
  bp::ConcretizeOptions copt;
  bp::ConcretizeResult conc = bp::concretize_repair(j.graph, *res.repaired, res.choices,
                                                    res.proof, *pm, ta ? &*ta : nullptr, copt);
  j.timings.emplace_back("concretize", seconds_since(t0));
  in.conc = &conc;
  if (!conc.ok) {
    in.verdict = "error";
    in.message = conc.error;
    finish(in, o, j, kBadInput);  // report written for diagnosis
    return fail("concretize", conc.error);
  }
  return finish(in, o, j, status_code(res));
}

int cmd_emit_smt(const Options& o, Job& j) {
  int rc = ensure_out_dir(o);
  if (rc >= 0) return rc;
  int64_t budget = initial_budget(o, j.cm);
  auto t0 = Clock::now();
  bp::SmtJob job = bp::emit_smt(j.graph, j.cutset, j.paths, j.cm, budget);
  j.timings.emplace_back("query_generation", seconds_since(t0));

  std::string path = o.out_dir + "/repair_budget_" + std::to_string(budget) + ".smt2";
  std::string err;
  if (!write_file(path, job.script, &err)) return fail("out", err);

  bp::ReportInputs in;
  in.graph = &j.graph;
  in.verdict = "ok";
  in.info = {{"budget", std::to_string(budget)},
             {"selectors", std::to_string(job.sels.size())},
             {"unknown_functions", std::to_string(job.funs.size())},
             {"script_bytes", std::to_string(job.script.size())}};
  in.artifacts.emplace_back("script", path);
  return finish(in, o, j, kOk);
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"cost-bounded automatic repair for boolean programs"};
  app.require_subcommand(1);

  auto add = [&](const std::string& name, const std::string& desc) {
    CLI::App* c = app.add_subcommand(name, desc);
    c->add_option("program", o.program_path, "boolean program source file")->required();
    c->add_option("--budget", o.budget, "starting repair budget");
    c->add_option("--budget-cap", o.budget_cap, "largest budget to try");
    c->add_option("--cost-model", o.cost_model_path, "cost model JSON file");
    c->add_option("--predicate-map", o.predicate_map_path, "predicate map JSON file");
    c->add_option("--template", o.template_path, "template assignment JSON file");
    c->add_option("--strategy", o.strategy, "expand | external")
        ->check(CLI::IsMember({"expand", "external"}));
    c->add_option("--solver-cmd", o.solver_cmd, "external solver command line");
    c->add_option("--out", o.out_dir, "directory for reports and artifacts");
    c->add_option("--oracle-depth", o.oracle_depth, "call depth bound for the execution oracle");
    c->add_flag("--strict-stuck", o.strict_stuck, "treat a false plain assume as a defect");
    return c;
  };
  add("repair", "search for a cheapest rewrite meeting every assertion");
  add("verify", "check the program as written (budget 0)");
  add("run", "exhaustively execute from every initial state");
  add("graph", "dump the transition graph and cut-set");
  add("concretize", "repair, then lift the changes through a predicate map");
  add("emit-smt", "write the quantified repair query for one budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  CLI::App* sub = app.get_subcommands().front();
  o.command = sub->get_name();
  o.budget_given = sub->count("--budget") > 0;
  if (o.budget < 0) return fail("config", "--budget must be nonnegative");
  if (o.oracle_depth < 1) return fail("config", "--oracle-depth must be positive");

  Job j;
  int rc = load_job(o, j);
  if (rc >= 0) return rc;

  if (o.command == "repair") return cmd_repair(o, j);
  if (o.command == "verify") return cmd_verify(o, j);
  if (o.command == "run") return cmd_run(o, j);
  if (o.command == "graph") return cmd_graph(o, j);
  if (o.command == "concretize") return cmd_concretize(o, j);
  if (o.command == "emit-smt") return cmd_emit_smt(o, j);
  return fail("config", "unknown command '" + o.command + "'");
}
