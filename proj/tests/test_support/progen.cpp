#include "progen.h"

#include <cassert>

#include "refexec.h"

#include "bprepair/cfg.h"
#include "bprepair/diagnostics.h"

namespace testsup {

bp::ExprPtr random_expr(std::mt19937& rng, const std::vector<std::string>& vars, int depth) {
  std::uniform_int_distribution<int> pct(0, 99);
  int r = pct(rng);
  std::uniform_int_distribution<size_t> pick(0, vars.size() - 1);
  if (depth == 0 || r < 35) return bp::mk_var(vars[pick(rng)]);
  if (r < 42) return bp::mk_bool(r & 1);
  if (r < 57) return bp::mk_not(random_expr(rng, vars, depth - 1));
  if (r < 75)
    return bp::mk_and(random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1));
  if (r < 93)
    return bp::mk_or(random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1));
  if (r < 97)
    return bp::mk_eq(random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1));
  return bp::mk_implies(random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1));
}

namespace {

struct GenState {
  std::mt19937* rng;
  std::vector<std::string> vars;
  int label_id = 1;
  bool loop_used = false;
};

bp::LabeledStatement labeled(GenState& st, bp::Statement s) {
  bp::LabeledStatement ls;
  ls.label = "s" + std::to_string(st.label_id++);
  ls.stmt = std::move(s);
  return ls;
}

bp::Statement random_assign(GenState& st) {
  std::mt19937& rng = *st.rng;
  bp::Statement s;
  s.kind = bp::StmtKind::Assign;
  std::uniform_int_distribution<size_t> pick(0, st.vars.size() - 1);
  std::uniform_int_distribution<int> pct(0, 99);
  size_t t0 = pick(rng);
  s.targets.push_back(st.vars[t0]);
  if (st.vars.size() > 1 && pct(rng) < 30) {
    size_t t1 = pick(rng);
    if (t1 != t0) s.targets.push_back(st.vars[t1]);
  }
  for (size_t i = 0; i < s.targets.size(); ++i)
    s.rhs.push_back(pct(rng) < 20 ? bp::mk_star() : random_expr(rng, st.vars));
  return s;
}

// Appends statements totalling at most `budget`; returns the count used.
int gen_seq(GenState& st, std::vector<bp::LabeledStatement>& out, int budget, bool allow_loop) {
  std::mt19937& rng = *st.rng;
  std::uniform_int_distribution<int> pct(0, 99);
  int used = 0;
  while (used < budget) {
    int left = budget - used;
    int r = pct(rng);
    if (r < 50 || left < 3) {
      out.push_back(labeled(st, random_assign(st)));
      used += 1;
    } else if (r < 70) {
      bp::Statement s;
      s.kind = bp::StmtKind::If;
      s.guard = pct(rng) < 20 ? bp::mk_star() : random_expr(rng, st.vars);
      int inner = 1 + gen_seq(st, s.then_body, std::min(left - 1, 2), false);
      if (pct(rng) < 50 && left - inner >= 1)
        inner += gen_seq(st, s.else_body, std::min(left - inner, 2), false);
      out.push_back(labeled(st, std::move(s)));
      used += inner;
    } else if (r < 80 && allow_loop && !st.loop_used && left >= 3) {
      st.loop_used = true;
      bp::Statement s;
      s.kind = bp::StmtKind::While;
      s.guard = pct(rng) < 25 ? bp::mk_star() : random_expr(rng, st.vars);
      int inner = 1 + gen_seq(st, s.then_body, std::min(left - 2, 3), false);
      bp::Statement fin;  // loop bodies end in skip
      s.then_body.push_back(labeled(st, std::move(fin)));
      out.push_back(labeled(st, std::move(s)));
      used += inner + 1;
    } else if (r < 90) {
      bp::Statement s;
      s.kind = bp::StmtKind::Assume;
      s.guard = random_expr(rng, st.vars, 1);
      out.push_back(labeled(st, std::move(s)));
      used += 1;
    } else {
      out.push_back(labeled(st, bp::Statement{}));  // skip
      used += 1;
    }
  }
  return used;
}

// Replace the guard of the final assert with the synthesized description of
// its reachable states, making the program correct by construction.
void close_with_assert(bp::Program& p, const std::string& assert_label) {
  bp::DiagnosticSink sink;
  auto g = bp::build_graph(p, sink, "<gen>");
  assert(g && !sink.has_errors());
  RefResult r = ref_explore(*g);
  int node = g->node_by_name(assert_label);
  assert(node >= 0);
  bp::TruthTable table = ref_states_at(r, *g, node);
  p.procedures[0].body.back().stmt.guard =
      bp::synthesize_from_table(table, p.inscope(0));
}

}  // namespace

bp::Program random_correct_program(std::mt19937& rng, const GenOptions& opt) {
  std::uniform_int_distribution<int> nv(opt.min_vars, opt.max_vars);
  GenState st;
  st.rng = &rng;
  int nvars = nv(rng);
  bp::Program p;
  for (int i = 0; i < nvars; ++i) {
    p.globals.push_back({"b" + std::to_string(i)});
    st.vars.push_back("b" + std::to_string(i));
  }
  bp::Procedure main;
  main.name = "main";
  gen_seq(st, main.body, opt.max_stmts - 1, opt.allow_loop);

  bp::Statement fin;
  fin.kind = bp::StmtKind::Assert;
  fin.guard = bp::mk_true();
  main.body.push_back(labeled(st, std::move(fin)));
  std::string assert_label = main.body.back().label;
  p.procedures.push_back(std::move(main));

  close_with_assert(p, assert_label);
  return p;
}

namespace {

void collect_mutable(std::vector<bp::LabeledStatement>& body, std::vector<bp::Statement*>& out) {
  for (auto& ls : body) {
    out.push_back(&ls.stmt);
    collect_mutable(ls.stmt.then_body, out);
    collect_mutable(ls.stmt.else_body, out);
  }
}

}  // namespace

bp::Program mutate(const bp::Program& p, std::mt19937& rng) {
  bp::Program q = p;
  std::vector<bp::Statement*> stmts;
  for (auto& proc : q.procedures) collect_mutable(proc.body, stmts);
  std::vector<std::string> vars = q.inscope(0);
  std::uniform_int_distribution<size_t> pick(0, stmts.size() - 1);
  std::uniform_int_distribution<int> pct(0, 99);
  for (int tries = 0; tries < 64; ++tries) {
    bp::Statement* s = stmts[pick(rng)];
    switch (s->kind) {
      case bp::StmtKind::Assign: {
        std::uniform_int_distribution<size_t> slot(0, s->rhs.size() - 1);
        s->rhs[slot(rng)] = pct(rng) < 15 ? bp::mk_star() : random_expr(rng, vars);
        return q;
      }
      case bp::StmtKind::If:
      case bp::StmtKind::IfJump:
      case bp::StmtKind::While:
        s->guard = pct(rng) < 15 ? bp::mk_star() : random_expr(rng, vars);
        return q;
      case bp::StmtKind::Assume:
        s->guard = random_expr(rng, vars);
        return q;
      case bp::StmtKind::Assert:
        // tightening the spec forces repairs elsewhere; keep it rare
        if (pct(rng) < 40) {
          s->guard = random_expr(rng, vars);
          return q;
        }
        break;
      default:
        break;
    }
  }
  return q;
}

bp::Program straightline_program(std::mt19937& rng, int n, int nvars) {
  GenState st;
  st.rng = &rng;
  bp::Program p;
  for (int i = 0; i < nvars; ++i) {
    p.globals.push_back({"b" + std::to_string(i)});
    st.vars.push_back("b" + std::to_string(i));
  }
  bp::Procedure main;
  main.name = "main";
  std::uniform_int_distribution<int> pct(0, 99);
  while (bp::count_statements(main.body) + 1 < size_t(n)) {
    int left = n - 1 - int(bp::count_statements(main.body));
    int r = pct(rng);
    if (r < 70 || left < 3) {
      main.body.push_back(labeled(st, random_assign(st)));
    } else {
      bp::Statement s;
      s.kind = bp::StmtKind::If;
      s.guard = random_expr(rng, st.vars, 1);
      s.then_body.push_back(labeled(st, random_assign(st)));
      if (left >= 4 && pct(rng) < 40)
        s.else_body.push_back(labeled(st, random_assign(st)));
      main.body.push_back(labeled(st, std::move(s)));
    }
  }
  bp::Statement fin;
  fin.kind = bp::StmtKind::Assert;
  fin.guard = bp::mk_true();
  main.body.push_back(labeled(st, std::move(fin)));
  std::string assert_label = main.body.back().label;
  p.procedures.push_back(std::move(main));
  close_with_assert(p, assert_label);
  return p;
}

}  // namespace testsup
