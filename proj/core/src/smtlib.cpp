#include "bprepair/smtlib.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "bprepair/hoare.h"

namespace bp {

namespace {

const char* smt_schema_token(UpdateSchema u) {
  switch (u) {
    case UpdateSchema::Id: return "id";
    case UpdateSchema::AssignAssign: return "assign_assign";
    case UpdateSchema::AssignSkip: return "assign_skip";
    case UpdateSchema::AssumeAssume: return "assume_assume";
    case UpdateSchema::AssumeSkip: return "assume_skip";
    case UpdateSchema::CallCall: return "call_call";
    case UpdateSchema::CallSkip: return "call_skip";
  }
  return "id";
}

// One quoted symbol per (variable, step tag); tags are step numbers along a
// path plus "d" for callee locals at a call. Quoting keeps copies disjoint
// from every program identifier and from each other.
std::string copy_sym(const std::string& var, const std::string& tag) {
  return "|" + var + "@" + tag + "|";
}
std::string copy_sym(const std::string& var, int step) {
  return copy_sym(var, std::to_string(step));
}

std::string expr_smt(const ExprPtr& e, int step) {
  switch (e->kind) {
    case ExprKind::True: return "true";
    case ExprKind::False: return "false";
    case ExprKind::Var: return copy_sym(e->name, step);
    case ExprKind::Not: return "(not " + expr_smt(e->a, step) + ")";
    case ExprKind::And:
      return "(and " + expr_smt(e->a, step) + " " + expr_smt(e->b, step) + ")";
    case ExprKind::Or:
      return "(or " + expr_smt(e->a, step) + " " + expr_smt(e->b, step) + ")";
    case ExprKind::Implies:
      return "(=> " + expr_smt(e->a, step) + " " + expr_smt(e->b, step) + ")";
    case ExprKind::Eq:
      return "(= " + expr_smt(e->a, step) + " " + expr_smt(e->b, step) + ")";
    case ExprKind::Neq:
      return "(distinct " + expr_smt(e->a, step) + " " + expr_smt(e->b, step) + ")";
    default:
      throw std::logic_error("expr_smt: nondeterministic operand");
  }
}

std::string conj(const std::vector<std::string>& parts) {
  if (parts.empty()) return "true";
  if (parts.size() == 1) return parts[0];
  std::string s = "(and";
  for (const auto& p : parts) s += " " + p;
  return s + ")";
}

std::string wrap_forall(const std::string& qvars, const std::string& body) {
  if (qvars.empty()) return body;
  return "(forall (" + qvars + ") " + body + ")";
}

struct Emitter {
  const TransitionGraph& g;
  const std::vector<int>& cutset;
  const std::vector<VerificationPath>& paths;
  const CostModel& cm;
  SmtJob job;
  std::ostringstream out;

  // node -> (schema, selector symbol); single-schema locations carry no
  // selector conditions in the matrix, mirroring the ground encoding.
  std::map<int, std::vector<std::pair<UpdateSchema, std::string>>> sels_at;
  std::map<int, std::string> guard_fn;
  std::map<int, std::vector<std::string>> assign_fn, callarg_fn;
  std::map<int, std::string> inv_fn;  // absent for main's entry

  Emitter(const TransitionGraph& g_, const std::vector<int>& cut,
          const std::vector<VerificationPath>& ps, const CostModel& cm_, int64_t budget)
      : g(g_), cutset(cut), paths(ps), cm(cm_) {
    job.budget = budget;
  }

  std::vector<std::string> scope_of(int node) const {
    return g.program->inscope(static_cast<size_t>(g.nodes[node].proc));
  }

  void declare_fun(const std::string& sym, int arity) {
    out << "(declare-fun " << sym << " (";
    for (int i = 0; i < arity; ++i) out << (i ? " Bool" : "Bool");
    out << ") Bool)\n";
  }

  void declare_unknowns() {
    std::vector<std::string> cost_terms;
    for (const auto& n : g.nodes) {
      if (!n.stmt) continue;
      std::vector<UpdateSchema> us;
      std::vector<int64_t> cost;
      for (UpdateSchema u : applicable_schemas(n.stmt->stmt, cm)) {
        int64_t c = cm.cost(u, n.name);
        if (c > job.budget) continue;  // unaffordable even alone
        us.push_back(u);
        cost.push_back(c);
      }
      out << "; location n" << n.id << " = " << n.name << "\n";
      auto& here = sels_at[n.id];
      for (UpdateSchema u : us) {
        std::string sym = "sel_n" + std::to_string(n.id) + "_" + smt_schema_token(u);
        here.push_back({u, sym});
        job.sels.push_back({n.id, u, sym});
        out << "(declare-fun " << sym << " () Bool)\n";
      }
      if (here.size() > 1) {
        out << "(assert (or";
        for (const auto& [u, sym] : here) out << " " << sym;
        out << "))\n";
        for (size_t i = 0; i < here.size(); ++i)
          for (size_t j = i + 1; j < here.size(); ++j)
            out << "(assert (not (and " << here[i].second << " " << here[j].second << ")))\n";
      } else {
        out << "(assert " << here[0].second << ")\n";
      }
      for (size_t i = 0; i < us.size(); ++i)
        if (cost[i] > 0)
          cost_terms.push_back("(ite " + here[i].second + " " + std::to_string(cost[i]) + " 0)");

      std::vector<std::string> sc = scope_of(n.id);
      int width = static_cast<int>(sc.size());
      for (UpdateSchema u : us) {
        switch (u) {
          case UpdateSchema::AssumeAssume: {
            std::string fn = "guard_n" + std::to_string(n.id);
            guard_fn[n.id] = fn;
            job.funs.push_back({fn, n.id, width, 'g', 0});
            declare_fun(fn, width);
            break;
          }
          case UpdateSchema::AssignAssign: {
            auto& fns = assign_fn[n.id];
            for (int i = 0; i < width; ++i) {
              std::string fn = "asg_n" + std::to_string(n.id) + "_" + std::to_string(i);
              fns.push_back(fn);
              job.funs.push_back({fn, n.id, width, 'a', i});
              declare_fun(fn, width);
            }
            break;
          }
          case UpdateSchema::CallCall: {
            const Procedure* callee = g.program->find_procedure(n.stmt->stmt.callee);
            auto& fns = callarg_fn[n.id];
            for (size_t i = 0; i < callee->formals.size(); ++i) {
              std::string fn = "arg_n" + std::to_string(n.id) + "_" + std::to_string(i);
              fns.push_back(fn);
              job.funs.push_back({fn, n.id, width, 'c', static_cast<int>(i)});
              declare_fun(fn, width);
            }
            break;
          }
          default:
            break;
        }
      }
    }

    out << "; cutpoint assertions (main's entry is pinned to true)\n";
    for (int c : cutset) {
      if (c == g.entry[0]) continue;
      std::string fn = "inv_n" + std::to_string(c);
      inv_fn[c] = fn;
      int width = static_cast<int>(assertion_vars(g, c).size());
      job.funs.push_back({fn, c, width, 'i', 0});
      out << "; " << fn << " = assertion at " << g.nodes[c].name << "\n";
      declare_fun(fn, width);
    }

    out << "(define-fun total_cost () Int ";
    if (cost_terms.empty()) {
      out << "0";
    } else if (cost_terms.size() == 1) {
      out << cost_terms[0];
    } else {
      out << "(+";
      for (const auto& t : cost_terms) out << " " << t;
      out << ")";
    }
    out << ")\n(assert (<= total_cost " << job.budget << "))\n";
  }

  // Invariant applied to the copies of its assertion variables at `step`;
  // assertion variables are always a scope prefix, so exits project.
  std::string inv_app(int node, int step) const {
    if (node == g.entry[0]) return "true";
    std::string s = "(" + inv_fn.at(node);
    for (const auto& v : assertion_vars(g, node)) s += " " + copy_sym(v, step);
    return s + ")";
  }

  std::string fn_app(const std::string& fn, const std::vector<std::string>& vars,
                     int step) const {
    if (vars.empty()) return fn;
    std::string s = "(" + fn;
    for (const auto& v : vars) s += " " + copy_sym(v, step);
    return s + ")";
  }

  std::string frame(const std::vector<std::string>& vars, int k0, int k1) const {
    std::vector<std::string> eqs;
    for (const auto& v : vars)
      eqs.push_back("(= " + copy_sym(v, k1) + " " + copy_sym(v, k0) + ")");
    return conj(eqs);
  }

  // Relation of one assignment under its original right-hand sides.
  std::string assign_id_rel(const Statement& s, const std::vector<std::string>& scope, int k0,
                            int k1) const {
    std::vector<std::string> parts;
    for (const auto& v : scope) {
      auto it = std::find(s.targets.begin(), s.targets.end(), v);
      if (it == s.targets.end()) {
        parts.push_back("(= " + copy_sym(v, k1) + " " + copy_sym(v, k0) + ")");
        continue;
      }
      const ExprPtr& r = s.rhs[it - s.targets.begin()];
      std::string nxt = copy_sym(v, k1);
      if (r->kind == ExprKind::Star) continue;  // unconstrained
      if (r->kind == ExprKind::Choose) {
        // true when the first arm holds, false when only the second does
        parts.push_back("(=> " + expr_smt(r->a, k0) + " " + nxt + ")");
        parts.push_back("(=> (and (not " + expr_smt(r->a, k0) + ") " + expr_smt(r->b, k0) +
                        ") (not " + nxt + "))");
        continue;
      }
      parts.push_back("(= " + nxt + " " + expr_smt(r, k0) + ")");
    }
    return conj(parts);
  }

  // Step relation of an interior path edge between copies k0 and k1,
  // conditioned on the from-location's selectors.
  std::string step_rel(const Edge& e, int k0, int k1) const {
    std::vector<std::string> scope = scope_of(e.from);
    switch (e.act.kind) {
      case ActKind::Skip:
      case ActKind::Return:
        return frame(scope, k0, k1);
      case ActKind::Assume: {
        std::vector<std::string> parts;
        parts.push_back(frame(scope, k0, k1));
        const auto& here = sels_at.at(e.from);
        for (const auto& [u, sym] : here) {
          std::string cond;
          if (u == UpdateSchema::Id) {
            if (e.act.guard->kind == ExprKind::True) continue;
            cond = expr_smt(e.act.guard, k0);
          } else if (u == UpdateSchema::AssumeAssume) {
            cond = fn_app(guard_fn.at(e.from), scope, k0);
            if (!e.tside) cond = "(not " + cond + ")";
          } else {
            continue;  // assume->skip: no condition
          }
          parts.push_back(here.size() == 1 ? cond : "(=> " + sym + " " + cond + ")");
        }
        return conj(parts);
      }
      case ActKind::Assign: {
        const auto& here = sels_at.at(e.from);
        std::vector<std::string> parts;
        for (const auto& [u, sym] : here) {
          std::string rel;
          if (u == UpdateSchema::Id) {
            rel = assign_id_rel(*e.act.stmt, scope, k0, k1);
          } else if (u == UpdateSchema::AssignAssign) {
            std::vector<std::string> eqs;
            const auto& fns = assign_fn.at(e.from);
            for (size_t i = 0; i < scope.size(); ++i)
              eqs.push_back("(= " + copy_sym(scope[i], k1) + " " + fn_app(fns[i], scope, k0) +
                            ")");
            rel = conj(eqs);
          } else {  // assign->skip
            rel = frame(scope, k0, k1);
          }
          parts.push_back(here.size() == 1 ? rel : "(=> " + sym + " " + rel + ")");
        }
        return conj(parts);
      }
      default:
        throw std::logic_error("step_rel: call/assert edge inside a path");
    }
  }

  std::string qlist(const std::vector<std::string>& vars, int step) const {
    std::string s;
    for (const auto& v : vars) {
      if (!s.empty()) s += " ";
      s += "(" + copy_sym(v, step) + " Bool)";
    }
    return s;
  }

  void emit_assert(const std::string& qvars, const std::string& ante, const std::string& concl) {
    std::string body = ante == "true" ? concl : "(=> " + ante + " " + concl + ")";
    out << "(assert " << wrap_forall(qvars, body) << ")\n";
  }

  void emit_normal_path(const VerificationPath& p) {
    std::vector<std::string> scope = scope_of(p.from);
    int m = static_cast<int>(p.edges.size());
    std::string qvars;
    for (int k = 0; k <= m; ++k) {
      std::string q = qlist(scope, k);
      if (!q.empty()) qvars += (qvars.empty() ? "" : " ") + q;
    }
    std::vector<std::string> ante;
    if (p.from != g.entry[0]) ante.push_back(inv_app(p.from, 0));
    for (int k = 0; k < m; ++k) ante.push_back(step_rel(g.edges[p.edges[k]], k, k + 1));
    emit_assert(qvars, conj(ante), inv_app(p.to, m));
  }

  void emit_assert_path(const VerificationPath& p) {
    const Edge& e = g.edges[p.edges[0]];
    std::vector<std::string> scope = scope_of(p.from);
    std::string qvars = qlist(scope, 0);
    emit_assert(qvars, inv_app(p.from, 0), expr_smt(e.act.guard, 0));
    emit_assert(qvars, inv_app(p.from, 0), inv_app(p.to, 0));
  }

  void emit_call_path(const VerificationPath& p) {
    const Edge& e = g.edges[p.edges[0]];
    const Statement& call = *e.act.stmt;
    int j = g.program->procedure_index(call.callee);
    const Procedure& callee = g.program->procedures[static_cast<size_t>(j)];
    std::vector<std::string> scope = scope_of(p.from);
    std::string q0 = qlist(scope, 0);
    std::string q1 = qlist(scope, 1);

    // Callee entry assertion ranges over globals, formals, then its locals;
    // locals start arbitrary, so their copies are quantified alongside.
    auto entry_app = [&](const std::vector<std::string>& formal_args) {
      std::string s = "(" + inv_fn.at(g.entry[j]);
      for (const auto& gv : g.program->globals) s += " " + copy_sym(gv.name, 0);
      for (const auto& a : formal_args) s += " " + a;
      for (const auto& d : callee.decls) s += " " + copy_sym(d.name, "d");
      return s + ")";
    };
    auto exit_app = [&](const std::vector<std::string>& formal_args, int step) {
      std::string s = "(" + inv_fn.at(g.exits[static_cast<size_t>(j)]);
      for (const auto& gv : g.program->globals) s += " " + copy_sym(gv.name, step);
      for (const auto& a : formal_args) s += " " + a;
      return s + ")";
    };
    std::string qdecls;
    for (const auto& d : callee.decls) {
      if (!qdecls.empty()) qdecls += " ";
      qdecls += "(" + copy_sym(d.name, "d") + " Bool)";
    }

    const auto& here = sels_at.at(e.from);
    auto guarded = [&](const std::string& sym, const std::string& body) {
      return here.size() == 1 ? body : "(=> " + sym + " " + body + ")";
    };

    for (const auto& [u, sym] : here) {
      if (u == UpdateSchema::CallSkip) {
        std::string ik = inv_app(p.from, 0), ik2 = inv_app(p.to, 0);
        out << "(assert "
            << wrap_forall(q0, guarded(sym, "(and (=> " + ik + " " + ik2 + ") (=> " + ik2 +
                                                " " + ik + "))"))
            << ")\n";
        continue;
      }
      // id keeps the written arguments; call->call replaces them with
      // unknown functions of the caller scope.
      std::vector<std::string> args0, args1;
      for (size_t i = 0; i < call.rhs.size(); ++i) {
        if (u == UpdateSchema::Id) {
          args0.push_back(expr_smt(call.rhs[i], 0));
          args1.push_back(expr_smt(call.rhs[i], 1));
        } else {
          args0.push_back(fn_app(callarg_fn.at(e.from)[i], scope, 0));
          args1.push_back(fn_app(callarg_fn.at(e.from)[i], scope, 1));
        }
      }
      std::string qe = q0 + (qdecls.empty() ? "" : " " + qdecls);
      std::string pre = inv_app(p.from, 0);
      std::string body = pre == "true" ? entry_app(args0) : "(=> " + pre + " " + entry_app(args0) + ")";
      out << "(assert " << wrap_forall(qe, guarded(sym, body)) << ")\n";
      out << "(assert "
          << wrap_forall(q1, guarded(sym, "(=> " + exit_app(args1, 1) + " " + inv_app(p.to, 1) +
                                              ")"))
          << ")\n";
    }
  }

  void run() {
    out << "; exists-forall repair query, budget " << job.budget << "\n";
    out << "(set-option :produce-models true)\n(set-logic UFLIA)\n";
    declare_unknowns();
    for (const auto& p : paths) {
      out << "; path " << path_to_string(g, p) << "\n";
      const Edge& first = g.edges[p.edges[0]];
      if (first.act.kind == ActKind::Call)
        emit_call_path(p);
      else if (first.act.kind == ActKind::AssertPass)
        emit_assert_path(p);
      else
        emit_normal_path(p);
    }
    out << "(check-sat)\n(get-model)\n";
    job.script = out.str();
  }
};

// ---- get-model response parsing ----

struct Sexp {
  bool atom = false;
  std::string s;
  std::vector<Sexp> kids;
};

struct SexpParser {
  const std::string& text;
  size_t pos = 0;

  explicit SexpParser(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == ';') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool parse(Sexp& out) {
    skip_ws();
    if (pos >= text.size()) return false;
    char c = text[pos];
    if (c == '(') {
      ++pos;
      out = Sexp{};
      Sexp kid;
      while (true) {
        skip_ws();
        if (pos < text.size() && text[pos] == ')') {
          ++pos;
          return true;
        }
        if (!parse(kid)) return false;  // unbalanced
        out.kids.push_back(std::move(kid));
      }
    }
    if (c == ')') return false;
    out = Sexp{};
    out.atom = true;
    if (c == '|') {
      ++pos;
      while (pos < text.size() && text[pos] != '|') out.s += text[pos++];
      if (pos < text.size()) ++pos;
      return true;
    }
    if (c == '"') {
      ++pos;
      while (pos < text.size() && text[pos] != '"') out.s += text[pos++];
      if (pos < text.size()) ++pos;
      return true;
    }
    while (pos < text.size()) {
      char d = text[pos];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') break;
      out.s += d;
      ++pos;
    }
    return !out.s.empty();
  }
};

struct ModelFun {
  std::vector<std::string> params;
  const Sexp* body = nullptr;
};

struct ModelEval {
  std::map<std::string, ModelFun> defs;

  bool eval(const Sexp& e, const std::unordered_map<std::string, bool>& env, int depth) const {
    if (depth > 64) throw std::runtime_error("model evaluation too deep");
    if (e.atom) {
      if (e.s == "true") return true;
      if (e.s == "false") return false;
      auto it = env.find(e.s);
      if (it != env.end()) return it->second;
      auto fit = defs.find(e.s);
      if (fit != defs.end() && fit->second.params.empty())
        return eval(*fit->second.body, {}, depth + 1);
      throw std::runtime_error("unbound symbol '" + e.s + "'");
    }
    if (e.kids.empty() || !e.kids[0].atom) throw std::runtime_error("bad application");
    const std::string& op = e.kids[0].s;
    auto arg = [&](size_t i) { return eval(e.kids[i], env, depth + 1); };
    if (op == "not") return !arg(1);
    if (op == "and") {
      for (size_t i = 1; i < e.kids.size(); ++i)
        if (!arg(i)) return false;
      return true;
    }
    if (op == "or") {
      for (size_t i = 1; i < e.kids.size(); ++i)
        if (arg(i)) return true;
      return false;
    }
    if (op == "xor") {
      bool v = false;
      for (size_t i = 1; i < e.kids.size(); ++i) v ^= arg(i);
      return v;
    }
    if (op == "=>") {
      bool v = arg(e.kids.size() - 1);
      for (size_t i = e.kids.size() - 1; i-- > 1;) v = !arg(i) || v;
      return v;
    }
    if (op == "=") {
      bool first = arg(1);
      for (size_t i = 2; i < e.kids.size(); ++i)
        if (arg(i) != first) return false;
      return true;
    }
    if (op == "distinct") return e.kids.size() == 3 && arg(1) != arg(2);
    if (op == "ite") return arg(1) ? arg(2) : arg(3);
    if (op == "!") return arg(1);  // annotation wrapper
    if (op == "let") {
      std::unordered_map<std::string, bool> inner = env;
      for (const auto& binding : e.kids[1].kids)
        inner[binding.kids[0].s] = eval(binding.kids[1], env, depth + 1);
      return eval(e.kids[2], inner, depth + 1);
    }
    auto fit = defs.find(op);
    if (fit != defs.end()) {
      const ModelFun& f = fit->second;
      if (f.params.size() != e.kids.size() - 1)
        throw std::runtime_error("arity mismatch applying '" + op + "'");
      std::unordered_map<std::string, bool> inner;
      for (size_t i = 0; i < f.params.size(); ++i) inner[f.params[i]] = arg(i + 1);
      return eval(*f.body, inner, depth + 1);
    }
    throw std::runtime_error("unsupported operator '" + op + "'");
  }

  TruthTable table_of(const std::string& name, int arity) const {
    auto it = defs.find(name);
    TruthTable t(1ull << arity, false);
    if (it == defs.end()) return t;  // unconstrained in the model
    const ModelFun& f = it->second;
    for (size_t row = 0; row < t.size(); ++row) {
      std::unordered_map<std::string, bool> env;
      for (size_t i = 0; i < f.params.size(); ++i) env[f.params[i]] = (row >> i) & 1u;
      t[row] = eval(*f.body, env, 0);
    }
    return t;
  }
};

void collect_define_funs(const Sexp& s, ModelEval& ev) {
  if (s.atom) return;
  if (!s.kids.empty() && s.kids[0].atom && s.kids[0].s == "define-fun" && s.kids.size() >= 5) {
    ModelFun f;
    for (const auto& p : s.kids[2].kids)
      if (!p.kids.empty()) f.params.push_back(p.kids[0].s);
    f.body = &s.kids[4];
    ev.defs[s.kids[1].s] = std::move(f);
    return;
  }
  for (const auto& k : s.kids) collect_define_funs(k, ev);
}

std::string bool_lit(bool b) { return b ? "true" : "false"; }

}  // namespace

SmtJob emit_smt(const TransitionGraph& g, const std::vector<int>& cutset,
                const std::vector<VerificationPath>& paths, const CostModel& cm,
                int64_t budget) {
  Emitter em(g, cutset, paths, cm, budget);
  em.run();
  return std::move(em.job);
}

std::optional<SolutionModel> parse_smt_model(const SmtJob& job, const TransitionGraph& g,
                                             const std::vector<int>& cutset,
                                             const std::string& response, std::string* error) {
  auto fail = [&](const std::string& msg) -> std::optional<SolutionModel> {
    if (error) *error = msg;
    return std::nullopt;
  };

  SexpParser parser(response);
  ModelEval ev;
  Sexp s;
  while (parser.parse(s)) collect_define_funs(s, ev);
  if (ev.defs.empty()) return fail("no define-fun entries in solver output");

  SolutionModel m;
  try {
    std::map<int, std::vector<std::pair<UpdateSchema, bool>>> chosen;
    for (const auto& sel : job.sels) {
      bool v = false;
      auto it = ev.defs.find(sel.symbol);
      if (it != ev.defs.end()) v = ev.eval(*it->second.body, {}, 0);
      chosen[sel.node].push_back({sel.schema, v});
    }
    for (const auto& [node, options] : chosen) {
      int count = 0;
      for (const auto& [u, v] : options)
        if (v) {
          m.schema[node] = u;
          ++count;
        }
      if (count != 1)
        return fail("model selects " + std::to_string(count) + " schemas at node " +
                    g.nodes[node].name);
    }
    for (const auto& fun : job.funs) {
      TruthTable t = ev.table_of(fun.symbol, fun.arity);
      switch (fun.kind) {
        case 'g':
          m.guard[fun.node] = std::move(t);
          break;
        case 'a': {
          auto& v = m.assign[fun.node];
          if (v.size() <= static_cast<size_t>(fun.index)) v.resize(fun.index + 1);
          v[static_cast<size_t>(fun.index)] = std::move(t);
          break;
        }
        case 'c': {
          auto& v = m.callargs[fun.node];
          if (v.size() <= static_cast<size_t>(fun.index)) v.resize(fun.index + 1);
          v[static_cast<size_t>(fun.index)] = std::move(t);
          break;
        }
        case 'i':
          m.proof.at[fun.node] = std::move(t);
          break;
      }
    }
  } catch (const std::exception& ex) {
    return fail(ex.what());
  }
  // main's entry has no declared function: it accepts every valuation
  size_t w = assertion_vars(g, g.entry[0]).size();
  m.proof.at[g.entry[0]] = TruthTable(1ull << w, true);
  (void)cutset;
  return m;
}

std::string smt_blocking_assert(const SmtJob& job, const SolutionModel& m,
                                const TransitionGraph& g) {
  (void)g;
  std::vector<std::string> atoms;
  for (const auto& sel : job.sels) {
    auto it = m.schema.find(sel.node);
    bool v = it != m.schema.end() && it->second == sel.schema;
    atoms.push_back(v ? sel.symbol : "(not " + sel.symbol + ")");
  }
  auto block_table = [&](const SmtJob::Fun& fun, const TruthTable& t) {
    for (size_t row = 0; row < t.size(); ++row) {
      std::string app = "(" + fun.symbol;
      for (int i = 0; i < fun.arity; ++i) app += " " + bool_lit((row >> i) & 1u);
      app += ")";
      atoms.push_back("(= " + app + " " + bool_lit(t[row]) + ")");
    }
  };
  for (const auto& fun : job.funs) {
    if (fun.kind == 'i') continue;  // block the rewrite, not the proof
    const TruthTable* t = nullptr;
    if (fun.kind == 'g') {
      auto it = m.guard.find(fun.node);
      if (it != m.guard.end()) t = &it->second;
    } else if (fun.kind == 'a') {
      auto it = m.assign.find(fun.node);
      if (it != m.assign.end()) t = &it->second[static_cast<size_t>(fun.index)];
    } else if (fun.kind == 'c') {
      auto it = m.callargs.find(fun.node);
      if (it != m.callargs.end()) t = &it->second[static_cast<size_t>(fun.index)];
    }
    if (t) block_table(fun, *t);
  }
  std::string body = conj(atoms);
  return "(assert (not " + body + "))\n";
}

SolverRun run_solver_command(const std::string& cmd, const std::string& script_path) {
  SolverRun run;
  std::string full = cmd + " '" + script_path + "' 2>&1";
  FILE* pipe = popen(full.c_str(), "r");
  if (!pipe) {
    run.detail = "failed to start: " + full;
    return run;
  }
  std::string text;
  char buf[4096];
  while (size_t got = fread(buf, 1, sizeof buf, pipe)) text.append(buf, got);
  int rc = pclose(pipe);

  size_t pos = 0;
  std::string verdict;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + (eol < text.size() ? 1 : 0);
    size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    size_t b = line.find_last_not_of(" \t\r");
    verdict = line.substr(a, b - a + 1);
    break;
  }
  run.detail = text;
  if (verdict == "sat") {
    run.outcome = SolverRun::Outcome::Sat;
    run.model = text.substr(pos);
  } else if (verdict == "unsat") {
    run.outcome = SolverRun::Outcome::Unsat;
  } else if (verdict == "unknown") {
    run.outcome = SolverRun::Outcome::Unknown;
  } else {
    run.outcome = SolverRun::Outcome::Failed;
    if (verdict.empty())
      run.detail = "no output from solver (exit status " + std::to_string(rc) + ")";
  }
  return run;
}

}  // namespace bp
