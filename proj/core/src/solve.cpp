#include "bprepair/solve.h"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>

#include "bprepair/parser.h"
#include "bprepair/smtlib.h"

namespace bp {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Statement* find_stmt(std::vector<LabeledStatement>& body, const std::string& label) {
  for (auto& ls : body) {
    if (ls.label == label) return &ls.stmt;
    if (Statement* s = find_stmt(ls.stmt.then_body, label)) return s;
    if (Statement* s = find_stmt(ls.stmt.else_body, label)) return s;
  }
  return nullptr;
}

TruthTable read_table(const SatSolver& S, const std::vector<Lit>& vars) {
  TruthTable t(vars.size());
  for (size_t i = 0; i < vars.size(); ++i) t[i] = S.value(vars[i]);
  return t;
}

UpdateSchema chosen_schema(const SatSolver& S, const LocationInfo& loc) {
  for (size_t i = 0; i < loc.sel.size(); ++i)
    if (S.value(loc.sel[i])) return loc.schemas[i];
  return UpdateSchema::Id;
}

}  // namespace

Program apply_solution(const TransitionGraph& g, const SolutionModel& m) {
  Program out = *g.program;
  for (const auto& [node, u] : m.schema) {
    if (u == UpdateSchema::Id) continue;
    const Node& n = g.nodes[node];
    Statement* s = find_stmt(out.procedures[n.proc].body, n.name);
    std::vector<std::string> scope_vars = out.inscope(n.proc);
    switch (u) {
      case UpdateSchema::AssumeAssume:
        s->guard = synthesize_from_table(m.guard.at(node), scope_vars);
        break;
      case UpdateSchema::AssignAssign: {
        // full-width rewrite: every variable in scope gets a defining table
        const auto& tables = m.assign.at(node);
        s->kind = StmtKind::Assign;
        s->guard = nullptr;
        s->labels.clear();
        s->callee.clear();
        s->then_body.clear();
        s->else_body.clear();
        s->targets = scope_vars;
        s->rhs.clear();
        for (size_t i = 0; i < scope_vars.size(); ++i)
          s->rhs.push_back(synthesize_from_table(tables[i], scope_vars));
        break;
      }
      case UpdateSchema::CallCall: {
        const auto& tables = m.callargs.at(node);
        for (size_t k = 0; k < s->rhs.size(); ++k)
          s->rhs[k] = synthesize_from_table(tables[k], scope_vars);
        break;
      }
      case UpdateSchema::AssumeSkip:
      case UpdateSchema::AssignSkip:
      case UpdateSchema::CallSkip:
        *s = Statement{};  // skip
        break;
      default: break;
    }
  }
  return out;
}

SolutionModel model_from_encoding(const TransitionGraph& g, const std::vector<int>& cutset,
                                  const Encoding& enc) {
  SolutionModel m;
  const SatSolver& S = *enc.solver;
  for (const auto& loc : enc.locations) m.schema[loc.node] = chosen_schema(S, loc);
  for (const auto& [node, rows] : enc.unknowns.guard) m.guard[node] = read_table(S, rows);
  for (const auto& [node, ts] : enc.unknowns.assign)
    for (const auto& rows : ts) m.assign[node].push_back(read_table(S, rows));
  for (const auto& [node, ts] : enc.unknowns.callargs)
    for (const auto& rows : ts) m.callargs[node].push_back(read_table(S, rows));
  for (int c : cutset) {
    if (c == g.entry[0]) {
      m.proof.at[c] = TruthTable(1ull << assertion_vars(g, c).size(), true);
      continue;
    }
    m.proof.at[c] = read_table(S, enc.invariant.at(c));
  }
  return m;
}

Program extract_program(const TransitionGraph& g, const Encoding& enc) {
  std::vector<int> cutset{g.entry[0]};
  for (const auto& [node, rows] : enc.invariant) cutset.push_back(node);
  std::sort(cutset.begin(), cutset.end());
  return apply_solution(g, model_from_encoding(g, cutset, enc));
}

Proof extract_proof(const TransitionGraph& g, const std::vector<int>& cutset,
                    const Encoding& enc) {
  return model_from_encoding(g, cutset, enc).proof;
}

RepairResult solve_repair(const TransitionGraph& g, const std::vector<int>& cutset,
                          const std::vector<VerificationPath>& paths, const CostModel& cm,
                          const SolveOptions& opt, DiagnosticSink& sink) {
  RepairResult res;
  std::string script_dir;  // external strategy: created on first use

  // Validation shared by both strategies: rebuild the rewritten program,
  // check the extracted proof, replay the exact semantics.  next_model
  // yields another candidate after a semantic rejection, or nullopt when
  // none is left.  Return codes as for attempt_one below.
  auto validate = [&](SolutionModel first, BudgetAttempt& attempt, int64_t budget,
                      const std::function<std::optional<SolutionModel>(const SolutionModel&)>&
                          next_model) -> int {
    size_t rejected = 0;
    std::optional<SolutionModel> cur = std::move(first);
    while (cur) {
      Program candidate = apply_solution(g, *cur);
      DiagnosticSink rebuild_sink;
      auto rg = build_graph(candidate, rebuild_sink);
      if (!rg) {
        res.status = RepairResult::Status::Inconclusive;
        res.message = "rewritten program failed to lower:\n" + rebuild_sink.format_all();
        res.attempts.push_back(attempt);
        return 2;
      }
      // The rewrite schemas never change successors, so the original cut-set
      // stays valid; paths are re-enumerated over the new labels.
      DiagnosticSink path_sink;
      auto rpaths = enumerate_verification_paths(*rg, cutset, path_sink);
      auto proof_err = path_sink.has_errors()
                           ? std::optional<std::string>(path_sink.format_all())
                           : check_proof(*rg, cutset, rpaths, cur->proof);
      if (proof_err) {
        res.status = RepairResult::Status::Inconclusive;
        res.message = "extracted proof does not check: " + *proof_err;
        res.attempts.push_back(attempt);
        return 2;
      }

      auto reject = [&]() -> int {  // 0 = try the next model, 2 = give up
        if (++rejected > opt.max_blocked_models) {
          res.status = RepairResult::Status::Inconclusive;
          res.message = "exhausted model candidates at budget " + std::to_string(budget);
          res.attempts.push_back(attempt);
          return 2;
        }
        cur = next_model(*cur);
        return 0;
      };

      // Cost is recomputed from the cost model, never trusted from the
      // solver; an external model over budget is a nonconforming model.
      int64_t recomputed = 0;
      for (const auto& [node, u] : cur->schema)
        if (u != UpdateSchema::Id) recomputed += cm.cost(u, g.nodes[node].name);
      if (recomputed > budget) {
        if (int rc = reject()) return rc;
        continue;
      }

      Verdict v = check_partial_correctness(*rg, opt.exec);
      if (v.kind == VerdictKind::ErrorReached) {
        // Modular call reasoning can admit a rewrite the exact semantics
        // rejects; exclude this model and try the next one.
        if (int rc = reject()) return rc;
        continue;
      }

      // accepted
      res.status = RepairResult::Status::Repaired;
      res.repaired = std::move(candidate);
      res.proof = cur->proof;
      res.budget_used = budget;
      res.verdict_note = v.kind == VerdictKind::BoundExceeded
                             ? "exact run bounded out; accepted on the checked proof"
                             : "exact run agrees: no assertion failure reachable";
      for (const auto& [node, u] : cur->schema) {
        if (u == UpdateSchema::Id) continue;
        const Node& n = g.nodes[node];
        int64_t c = cm.cost(u, n.name);
        res.choices.push_back({n.name, u, c});
        res.total_cost += c;
        if (u == UpdateSchema::AssignAssign || u == UpdateSchema::AssignSkip) ++res.num_assign;
        if (u == UpdateSchema::AssumeAssume || u == UpdateSchema::AssumeSkip) ++res.num_assume;
      }
      // Cumulative costs per cutpoint: locations of the same procedure that
      // come textually earlier contribute; main's exit carries the total.
      for (int c : cutset) {
        const Node& cn = g.nodes[c];
        if (cn.id == g.exits[0]) {
          res.cost_valuation[c] = res.total_cost;
          continue;
        }
        int64_t sum = 0;
        for (const auto& [node, u] : cur->schema) {
          const Node& ln = g.nodes[node];
          if (ln.proc != cn.proc || ln.id >= cn.id || u == UpdateSchema::Id) continue;
          sum += cm.cost(u, ln.name);
        }
        res.cost_valuation[c] = sum;
      }
      res.message = res.choices.empty()
                        ? "already satisfies every assertion; nothing to change"
                        : "rewrite found within budget " + std::to_string(budget);
      res.attempts.push_back(attempt);
      return 1;
    }

    res.attempts.push_back(attempt);
    return 0;
  };

  auto attempt_expand = [&](int64_t budget, BudgetAttempt& attempt) -> int {
    auto t0 = std::chrono::steady_clock::now();
    EncodeOptions eopt;
    eopt.budget = budget;
    eopt.max_branch_states = opt.max_branch_states;
    auto enc = encode_repair(g, cutset, paths, cm, eopt, sink);
    attempt.encode_seconds = seconds_since(t0);
    if (!enc) {
      res.status = RepairResult::Status::Inconclusive;
      res.message = "encoding failed";
      res.attempts.push_back(attempt);
      return 2;
    }
    attempt.vars = enc->num_vars;
    attempt.clauses = enc->num_clauses;

    // Preferred guard tables become solver assumptions: a repair agreeing
    // with them is produced when one exists, without excluding the rest of
    // the space when none does.
    std::vector<Lit> preferences;
    for (const auto& [label, text] : cm.preferred_guards) {
      int node = g.node_by_name(label);
      if (node < 0 || !enc->unknowns.guard.count(node)) continue;
      std::string err;
      ExprPtr e = parse_expr_text(text, &err);
      if (!e) {
        sink.error("<cost-model>", 0, 0, DiagCode::BadInput,
                   "preferred guard for '" + label + "': " + err);
        res.status = RepairResult::Status::Inconclusive;
        res.message = "bad preferred guard";
        return 2;
      }
      std::vector<std::string> scope_vars = g.program->inscope(g.nodes[node].proc);
      std::vector<std::string> used;
      collect_vars(e, used);
      for (const auto& v : used)
        if (std::find(scope_vars.begin(), scope_vars.end(), v) == scope_vars.end()) {
          sink.error("<cost-model>", 0, 0, DiagCode::BadInput,
                     "preferred guard for '" + label + "' uses unknown variable '" + v + "'");
          res.status = RepairResult::Status::Inconclusive;
          res.message = "bad preferred guard";
          return 2;
        }
      TruthTable t = truth_table(e, scope_vars);
      const auto& rows = enc->unknowns.guard.at(node);
      for (size_t r = 0; r < rows.size(); ++r)
        preferences.push_back(t[r] ? rows[r] : -rows[r]);
    }

    t0 = std::chrono::steady_clock::now();
    SatSolver& S = *enc->solver;
    bool sat = false;
    if (!preferences.empty() && S.solve(preferences)) {
      sat = true;
      attempt.used_preferences = true;
    } else if (S.okay() && S.solve()) {
      sat = true;
    }
    attempt.solve_seconds = seconds_since(t0);
    attempt.satisfiable = sat;
    if (!sat) {
      res.attempts.push_back(attempt);
      return 0;
    }

    auto next_model = [&](const SolutionModel&) -> std::optional<SolutionModel> {
      // the solver still holds the rejected model; flip it into a clause
      std::vector<Lit> block;
      for (const auto& loc : enc->locations)
        for (Lit sl : loc.sel) block.push_back(S.value(sl) ? -sl : sl);
      auto block_tables = [&](const std::vector<Lit>& rows) {
        for (Lit r : rows) block.push_back(S.value(r) ? -r : r);
      };
      for (const auto& [n, rows] : enc->unknowns.guard) block_tables(rows);
      for (const auto& [n, ts] : enc->unknowns.assign)
        for (const auto& rows : ts) block_tables(rows);
      for (const auto& [n, ts] : enc->unknowns.callargs)
        for (const auto& rows : ts) block_tables(rows);
      S.add_clause(block);
      auto t1 = std::chrono::steady_clock::now();
      bool again = S.okay() && S.solve();
      attempt.solve_seconds += seconds_since(t1);
      if (!again) return std::nullopt;
      return model_from_encoding(g, cutset, *enc);
    };
    return validate(model_from_encoding(g, cutset, *enc), attempt, budget, next_model);
  };

  auto attempt_external = [&](int64_t budget, BudgetAttempt& attempt) -> int {
    auto t0 = std::chrono::steady_clock::now();
    SmtJob job = emit_smt(g, cutset, paths, cm, budget);
    attempt.encode_seconds = seconds_since(t0);
    attempt.vars = job.sels.size() + job.funs.size();
    for (size_t p = job.script.find("(assert"); p != std::string::npos;
         p = job.script.find("(assert", p + 1))
      ++attempt.clauses;

    if (script_dir.empty()) {
      if (!opt.script_dir.empty()) {
        script_dir = opt.script_dir;
      } else {
        char tmpl[] = "/tmp/bprepair_smt_XXXXXX";
        const char* d = mkdtemp(tmpl);
        if (!d) {
          res.status = RepairResult::Status::Inconclusive;
          res.message = "cannot create a scratch directory for solver scripts";
          res.attempts.push_back(attempt);
          return 2;
        }
        script_dir = d;
      }
    }
    std::string script_path = script_dir + "/repair_budget_" + std::to_string(budget) + ".smt2";
    size_t tail_at = job.script.rfind("(check-sat)");
    std::string prefix = job.script.substr(0, tail_at);
    std::string blockers;
    auto run_once = [&]() -> SolverRun {
      {
        std::ofstream f(script_path);
        f << prefix << blockers << "(check-sat)\n(get-model)\n";
      }
      auto t1 = std::chrono::steady_clock::now();
      SolverRun r = run_solver_command(opt.solver_cmd, script_path);
      attempt.solve_seconds += seconds_since(t1);
      return r;
    };

    SolverRun r = run_once();
    if (r.outcome == SolverRun::Outcome::Unsat) {
      res.attempts.push_back(attempt);
      return 0;
    }
    if (r.outcome != SolverRun::Outcome::Sat) {
      res.status = RepairResult::Status::Inconclusive;
      res.solver_failure = true;
      res.message = r.outcome == SolverRun::Outcome::Unknown
                        ? "external solver returned unknown"
                        : "external solver failed: " + r.detail.substr(0, 300);
      res.attempts.push_back(attempt);
      return 2;
    }
    attempt.satisfiable = true;
    std::string perr;
    auto first = parse_smt_model(job, g, cutset, r.model, &perr);
    if (!first) {
      res.status = RepairResult::Status::Inconclusive;
      res.solver_failure = true;
      res.message = "could not read the solver model: " + perr;
      res.attempts.push_back(attempt);
      return 2;
    }
    auto next_model = [&](const SolutionModel& bad) -> std::optional<SolutionModel> {
      blockers += smt_blocking_assert(job, bad, g);
      SolverRun rr = run_once();
      if (rr.outcome != SolverRun::Outcome::Sat) return std::nullopt;
      std::string err2;
      auto m = parse_smt_model(job, g, cutset, rr.model, &err2);
      if (!m) return std::nullopt;
      return m;
    };
    return validate(std::move(*first), attempt, budget, next_model);
  };

  // One solve round at a fixed budget.  Returns 0 when the instance is
  // unsatisfiable, 1 when res now holds an accepted rewrite, 2 when the
  // round failed in a way that ends the whole search.
  auto attempt_one = [&](int64_t budget) -> int {
    BudgetAttempt attempt;
    attempt.budget = budget;
    return opt.strategy == SolveOptions::Strategy::External ? attempt_external(budget, attempt)
                                                            : attempt_expand(budget, attempt);
  };

  for (int64_t budget = opt.initial_budget; budget <= opt.budget_cap; ++budget) {
    int rc = attempt_one(budget);
    if (rc == 2) return res;
    if (rc != 1) continue;
    // A hit on the very first budget tried leaves the true minimum open; a
    // hit above it is already minimal because the previous round came back
    // unsatisfiable.  Probe downward so a program that needs nothing comes
    // back untouched (cost 0) rather than with an arbitrary in-budget edit.
    if (budget == opt.initial_budget) {
      for (int64_t lower = budget - 1; lower >= 0; --lower) {
        RepairResult saved = std::move(res);
        res = RepairResult{};
        res.attempts = std::move(saved.attempts);
        if (attempt_one(lower) == 1) continue;
        saved.attempts = std::move(res.attempts);
        res = std::move(saved);
        break;
      }
    }
    return res;
  }

  res.status = RepairResult::Status::Unrepairable;
  res.message = "no rewrite within budget cap " + std::to_string(opt.budget_cap);
  return res;
}

}  // namespace bp
