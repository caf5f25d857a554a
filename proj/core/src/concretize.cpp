#include "bprepair/concretize.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "bprepair/lira.h"
#include "bprepair/printer.h"

namespace bp {

namespace {

// Template-shaped rendering: constant folded into the term, compared to 0.
std::string guard_atom_text(const CAtom& a) {
  return term_to_string(a.term) + " <= 0";
}

// Per-slot values tried in magnitude order: 0, -1, 1, -2, 2, ...
std::int64_t value_at(size_t idx) {
  if (idx == 0) return 0;
  std::int64_t m = static_cast<std::int64_t>((idx + 1) / 2);
  return idx % 2 ? -m : m;
}

bool level_too_big(size_t slots, int level, size_t cap) {
  return std::pow(2.0 * level + 1.0, static_cast<double>(slots)) > static_cast<double>(cap);
}

// Enumerate numerator vectors whose largest magnitude is exactly `level`.
// fn returns false to stop early; the return value says whether enumeration
// ran to completion.
bool for_each_vector(size_t slots, int level,
                     const std::function<bool(const std::vector<std::int64_t>&)>& fn) {
  size_t per_slot = 2 * static_cast<size_t>(level) + 1;
  std::vector<size_t> idx(slots, 0);
  std::vector<std::int64_t> vals(slots, 0);
  for (;;) {
    std::int64_t max_mag = 0;
    for (size_t i = 0; i < slots; ++i) {
      vals[i] = value_at(idx[i]);
      std::int64_t m = vals[i] < 0 ? -vals[i] : vals[i];
      if (m > max_mag) max_mag = m;
    }
    if (slots == 0) return level == 0 ? fn(vals) : true;
    if (max_mag == level && !fn(vals)) return false;
    size_t i = 0;
    while (i < slots && ++idx[i] == per_slot) idx[i++] = 0;
    if (i == slots) return true;
  }
}

}  // namespace

CFormulaPtr concretize_guard_simple(const ExprPtr& g, const PredicateMap& pm, std::string* err) {
  CFormulaPtr f = gamma_expr(g, pm, err);
  return f ? simplify_cformula(f, pm.sorts) : nullptr;
}

GuardSynthesis synthesize_guard_atom(const CFormulaPtr& target, const PredicateMap& pm,
                                     const LinearTemplate& t, const ConcretizeOptions& opt) {
  GuardSynthesis syn;
  CFormulaPtr s = simplify_cformula(target, pm.sorts);
  std::vector<std::string> tvars;
  collect_cvars(s, tvars);

  auto verified = [&](const CAtom& a) {
    return lira_valid(cf_iff(cf_atom(a), s), pm.sorts) == Tri::Yes;
  };
  auto accept = [&](const CAtom& a) {
    for (const auto& have : syn.atoms)
      if (catom_equal(have, a)) return;
    syn.atoms.push_back(normalize_atom(a));
    syn.found = true;
  };

  // Constructive path: a simplified single-variable formula is already the
  // canonical description of its solution set.
  if (tvars.empty()) {
    CAtom a{LinTerm(Rational(s->kind == CKind::True ? 0 : 1)), CmpOp::Le};
    if (verified(a)) {
      accept(a);
      return syn;
    }
  } else if (tvars.size() == 1) {
    if (s->kind == CKind::Atom && s->atom.op == CmpOp::Le) {
      if (verified(s->atom)) {
        accept(s->atom);
        return syn;
      }
    } else if (s->kind == CKind::Atom && s->atom.op == CmpOp::Lt) {
      if (pm.sorts.count(tvars[0]) && pm.sorts.at(tvars[0]) == Sort::Int) {
        CAtom a = normalize_atom(s->atom);  // integer entries
        a.term.constant = a.term.constant + Rational(1);
        a.op = CmpOp::Le;
        if (verified(a)) {
          accept(a);
          return syn;
        }
      } else {
        syn.note = "a strict bound over a real variable has no <= form";
        return syn;
      }
    } else if (s->kind == CKind::Atom && s->atom.op == CmpOp::Eq) {
      syn.note = "an equality is not a single linear inequality";
      return syn;
    } else {
      syn.note = "the solution set is not a single half-line";
      return syn;
    }
  }

  // Bounded search: constant slot plus one coefficient per mentioned
  // variable (a coefficient on an unmentioned variable breaks equivalence).
  size_t slots = tvars.size() + 1;
  bool int_only = opt.integer_only || t.integer_only;
  std::vector<std::int64_t> dens{1};
  if (!int_only)
    for (std::int64_t d = 2; d <= t.den_bound; ++d) dens.push_back(d);
  size_t checks = 0;
  bool capped = false;
  for (int level = 0; level <= t.coeff_bound && !capped; ++level) {
    if (level_too_big(slots, level, opt.candidate_cap)) {
      capped = true;
      break;
    }
    for (std::int64_t d : dens) {
      if (level == 0 && d > 1) continue;
      bool done = !for_each_vector(slots, level, [&](const std::vector<std::int64_t>& v) {
        if (++checks > opt.candidate_cap) {
          capped = true;
          return false;
        }
        CAtom a;
        a.op = CmpOp::Le;
        a.term.constant = Rational(v[0], d);
        for (size_t i = 0; i < tvars.size(); ++i) a.term.add_coeff(tvars[i], Rational(v[i + 1], d));
        if (verified(a)) {
          accept(a);
          if (syn.atoms.size() >= static_cast<size_t>(opt.max_members)) return false;
        }
        return true;
      });
      if (done || capped) break;
    }
    if (syn.found && syn.atoms.size() >= static_cast<size_t>(opt.max_members)) break;
  }
  if (!syn.found)
    syn.note = capped ? "parameter search capped after " + std::to_string(checks) + " candidates"
                      : "no equivalent linear atom with parameters up to " +
                            std::to_string(t.coeff_bound);
  return syn;
}

AssignSynthesis synthesize_assign(const std::vector<std::string>& bool_vars,
                                  const std::vector<ExprPtr>& rhs, const PredicateMap& pm,
                                  const LinearTemplate& t, const ConcretizeOptions& opt) {
  AssignSynthesis syn;
  if (bool_vars.size() != rhs.size()) {
    syn.note = "assignment arity mismatch";
    return syn;
  }
  size_t r = bool_vars.size();
  std::vector<CFormulaPtr> gb(r), ge(r);
  std::vector<bool> touched(r);
  std::string err;
  for (size_t i = 0; i < r; ++i) {
    auto it = pm.preds.find(bool_vars[i]);
    if (it == pm.preds.end()) {
      syn.note = "no predicate for variable '" + bool_vars[i] + "'";
      return syn;
    }
    gb[i] = it->second;
    ge[i] = gamma_expr(rhs[i], pm, &err);
    if (!ge[i]) {
      syn.note = err;
      return syn;
    }
    touched[i] = !(rhs[i]->kind == ExprKind::Var && rhs[i]->name == bool_vars[i]);
  }

  // Dependency pruning: a concrete variable no touched predicate mentions
  // never has to change, so its update stays v := v.
  std::vector<std::string> touched_vars;
  for (size_t i = 0; i < r; ++i)
    if (touched[i]) collect_cvars(gb[i], touched_vars);
  std::vector<std::string> active;
  for (const auto& v : pm.variables)
    if (!t.freeze.count(v) &&
        std::find(touched_vars.begin(), touched_vars.end(), v) != touched_vars.end())
      active.push_back(v);

  // Rows that cannot be affected by any synthesized update are skipped.
  std::vector<size_t> rows;
  for (size_t i = 0; i < r; ++i) {
    std::vector<std::string> pv;
    collect_cvars(gb[i], pv);
    bool affected = touched[i];
    for (const auto& v : active)
      if (std::find(pv.begin(), pv.end(), v) != pv.end()) affected = true;
    if (affected) rows.push_back(i);
  }

  auto matrix_valid = [&](const std::map<std::string, LinTerm>& h) {
    std::map<std::string, LinTerm> sub;
    for (const auto& [v, term] : h)
      if (!term.is_variable(v)) sub.emplace(v, term);
    std::vector<CFormulaPtr> conj;
    for (size_t i : rows) conj.push_back(cf_iff(subst_formula(gb[i], sub), ge[i]));
    return lira_valid(cf_and_all(conj), pm.sorts);
  };

  auto member_of = [&](const std::map<std::string, LinTerm>& h) {
    AssignMember m;
    for (const auto& v : active) {
      const LinTerm& term = h.at(v);
      if (term.is_variable(v)) continue;  // redundant v := v elided
      m.updates.emplace_back(v, term);
    }
    if (m.updates.empty()) {
      m.text = "skip";
    } else {
      std::string lhs, rhsx;
      for (size_t i = 0; i < m.updates.size(); ++i) {
        if (i) {
          lhs += ", ";
          rhsx += ", ";
        }
        lhs += m.updates[i].first;
        rhsx += term_to_string(m.updates[i].second);
      }
      m.text = lhs + " := " + rhsx;
    }
    return m;
  };
  auto accept = [&](const std::map<std::string, LinTerm>& h) {
    AssignMember m = member_of(h);
    for (const auto& have : syn.members)
      if (have.text == m.text) return;
    syn.members.push_back(std::move(m));
    syn.found = true;
  };

  // Slot layout per active variable: constant term first, then one
  // coefficient per concrete variable; template pins remove slots.
  struct Slot {
    std::string target, var;  // var empty = constant term
  };
  std::vector<Slot> free_slots;
  auto pinned = [&](const std::string& target, const std::string& var) -> const Rational* {
    auto it = t.pins.find(target);
    if (it == t.pins.end()) return nullptr;
    auto jt = it->second.find(var.empty() ? "const" : var);
    return jt == it->second.end() ? nullptr : &jt->second;
  };
  for (const auto& v : active) {
    if (!pinned(v, "")) free_slots.push_back({v, ""});
    for (const auto& p : pm.variables)
      if (!pinned(v, p)) free_slots.push_back({v, p});
  }

  // An Int-typed variable must get an integer-valued term, so its slots
  // ignore fractional denominators (Eq-style type preservation).
  auto slot_den = [&](const Slot& s, std::int64_t den) -> std::int64_t {
    auto it = pm.sorts.find(s.target);
    return it != pm.sorts.end() && it->second == Sort::Int ? 1 : den;
  };
  auto build_h = [&](const std::vector<std::int64_t>& vals, std::int64_t den) {
    std::map<std::string, LinTerm> h;
    for (const auto& v : active) {
      LinTerm term;
      if (const Rational* c = pinned(v, "")) term.constant = *c;
      for (const auto& p : pm.variables)
        if (const Rational* c = pinned(v, p)) term.add_coeff(p, *c);
      h.emplace(v, std::move(term));
    }
    for (size_t i = 0; i < free_slots.size(); ++i) {
      if (vals[i] == 0) continue;
      LinTerm& term = h.at(free_slots[i].target);
      std::int64_t d = slot_den(free_slots[i], den);
      if (free_slots[i].var.empty())
        term.constant = term.constant + Rational(vals[i], d);
      else
        term.add_coeff(free_slots[i].var, Rational(vals[i], d));
    }
    return h;
  };

  // The unchanged program first, when the pins allow it.
  bool identity_in_space = true;
  for (const auto& v : active) {
    if (const Rational* c = pinned(v, ""); c && !c->is_zero()) identity_in_space = false;
    for (const auto& p : pm.variables)
      if (const Rational* c = pinned(v, p); c && *c != Rational(p == v ? 1 : 0))
        identity_in_space = false;
  }
  size_t checks = 0;
  bool capped = false, unknown_hit = false;
  if (identity_in_space) {
    std::map<std::string, LinTerm> h;
    for (const auto& v : active) h.emplace(v, LinTerm::variable(v));
    ++checks;
    Tri verdict = matrix_valid(h);
    if (verdict == Tri::Yes) accept(h);
    if (verdict == Tri::Unknown) unknown_hit = true;
  }

  bool int_only = opt.integer_only || t.integer_only;
  if (!int_only) {
    // fractions can only ever appear on Real-typed targets
    int_only = true;
    for (const auto& v : active) {
      auto it = pm.sorts.find(v);
      if (it != pm.sorts.end() && it->second == Sort::Real) int_only = false;
    }
  }
  std::vector<std::int64_t> dens{1};
  if (!int_only)
    for (std::int64_t d = 2; d <= t.den_bound; ++d) dens.push_back(d);
  for (int level = 0; level <= t.coeff_bound && !capped; ++level) {
    if (syn.members.size() >= static_cast<size_t>(opt.max_members)) break;
    if (level_too_big(free_slots.size(), level, opt.candidate_cap)) {
      capped = true;
      break;
    }
    for (std::int64_t d : dens) {
      if (level == 0 && d > 1) continue;
      bool done = !for_each_vector(free_slots.size(), level,
                                   [&](const std::vector<std::int64_t>& vals) {
        if (++checks > opt.candidate_cap) {
          capped = true;
          return false;
        }
        auto h = build_h(vals, d);
        Tri verdict = matrix_valid(h);
        if (verdict == Tri::Unknown) unknown_hit = true;
        if (verdict == Tri::Yes) {
          accept(h);
          if (syn.members.size() >= static_cast<size_t>(opt.max_members)) return false;
        }
        return true;
      });
      if (done || capped) break;
    }
  }
  if (!syn.found) {
    syn.note = capped ? "parameter search capped after " + std::to_string(checks) + " candidates"
                      : "no linear instantiation with parameters up to " +
                            std::to_string(t.coeff_bound);
    if (unknown_hit) syn.note += " (some candidates hit solver limits)";
  }
  return syn;
}

std::string concretize_assertion(const TruthTable& table, const std::vector<std::string>& vars,
                                 const PredicateMap& pm, std::string* err) {
  ExprPtr e = synthesize_from_table(table, vars);
  CFormulaPtr f = gamma_expr(e, pm, err);
  if (!f) return "";
  return cformula_to_string(simplify_cformula(f, pm.sorts));
}

namespace {

// Guard text placed back into the statement shape it came from; structured
// bodies are not reprinted (only the guard was modified).
std::string guard_in_context(const Statement& st, const std::string& guard) {
  switch (st.kind) {
    case StmtKind::IfJump: {
      std::string s = "if (" + guard + ") goto " + st.labels[0];
      if (st.labels.size() > 1) s += " else goto " + st.labels[1];
      return s;
    }
    case StmtKind::If: return "if (" + guard + ") then ... fi";
    case StmtKind::While: return "while (" + guard + ") do ... od";
    default: return "assume (" + guard + ")";
  }
}

}  // namespace

ConcretizeResult concretize_repair(const TransitionGraph& graph, const Program& repaired,
                                   const std::vector<RepairChoice>& choices, const Proof& proof,
                                   const PredicateMap& pm, const TemplateAssignment* templates,
                                   const ConcretizeOptions& opt) {
  ConcretizeResult res;
  if (auto gap = predicate_map_gap(pm, repaired)) {
    res.ok = false;
    res.error = "no predicate for program variable '" + *gap + "'";
    return res;
  }
  std::map<std::string, std::pair<const Statement*, int>> by_label;
  for (size_t pi = 0; pi < repaired.procedures.size(); ++pi)
    for_each_statement(repaired.procedures[pi].body, [&](const LabeledStatement& ls) {
      by_label.emplace(ls.label, std::make_pair(&ls.stmt, static_cast<int>(pi)));
    });

  auto fail = [&](const std::string& msg) {
    res.ok = false;
    res.error = msg;
    return res;
  };

  for (const auto& ch : choices) {
    if (ch.schema == UpdateSchema::Id) continue;
    auto it = by_label.find(ch.label);
    if (it == by_label.end())
      return fail("label '" + ch.label + "' is not in the repaired program");
    const Statement& st = *it->second.first;
    int proc = it->second.second;
    const LinearTemplate* tpl = templates ? templates->lookup(ch.label) : nullptr;
    if (templates && !tpl)
      return fail("no template for modified location '" + ch.label + "'");

    ConcreteChange out;
    out.label = ch.label;
    out.schema = ch.schema;
    out.abstract_text = print_statement(st);

    switch (ch.schema) {
      case UpdateSchema::AssignSkip:
      case UpdateSchema::AssumeSkip:
      case UpdateSchema::CallSkip:
        out.statements.push_back("skip");
        break;
      case UpdateSchema::AssumeAssume: {
        std::string err;
        CFormulaPtr target = gamma_expr(st.guard, pm, &err);
        if (!target) return fail("at " + ch.label + ": " + err);
        if (tpl) {
          GuardSynthesis gs = synthesize_guard_atom(target, pm, *tpl, opt);
          out.note = gs.note;
          for (const auto& a : gs.atoms) {
            out.exprs.push_back(guard_atom_text(a));
            out.statements.push_back(guard_in_context(st, guard_atom_text(a)));
          }
        } else {
          std::string text = cformula_to_string(simplify_cformula(target, pm.sorts));
          out.exprs.push_back(text);
          out.statements.push_back(guard_in_context(st, text));
        }
        break;
      }
      case UpdateSchema::CallCall: {
        std::vector<std::string> args;
        bool all_ok = true;
        for (size_t i = 0; i < st.rhs.size() && all_ok; ++i) {
          std::string err;
          CFormulaPtr target = gamma_expr(st.rhs[i], pm, &err);
          if (!target) return fail("at " + ch.label + ": " + err);
          if (tpl) {
            GuardSynthesis gs = synthesize_guard_atom(target, pm, *tpl, opt);
            if (!gs.found) {
              all_ok = false;
              out.note = "argument " + std::to_string(i + 1) + ": " + gs.note;
            } else {
              args.push_back(guard_atom_text(gs.atoms[0]));
            }
          } else {
            args.push_back(cformula_to_string(simplify_cformula(target, pm.sorts)));
          }
        }
        if (all_ok) {
          std::string text = "call " + st.callee + "(";
          for (size_t i = 0; i < args.size(); ++i) {
            if (i) text += ", ";
            text += args[i];
          }
          out.statements.push_back(text + ")");
          out.exprs = args;
        }
        break;
      }
      case UpdateSchema::AssignAssign: {
        std::vector<std::string> bvars = repaired.inscope(proc);
        std::vector<ExprPtr> rhs;
        for (const auto& v : bvars) {
          ExprPtr e;
          for (size_t i = 0; i < st.targets.size(); ++i)
            if (st.targets[i] == v) e = st.rhs[i];
          rhs.push_back(e ? e : mk_var(v));
        }
        LinearTemplate eff = tpl ? *tpl : LinearTemplate{};
        AssignSynthesis as = synthesize_assign(bvars, rhs, pm, eff, opt);
        out.note = as.note;
        for (const auto& m : as.members) out.statements.push_back(m.text);
        if (!as.members.empty())
          for (const auto& [v, term] : as.members[0].updates)
            out.exprs.push_back(term_to_string(term));
        break;
      }
      case UpdateSchema::Id:
        break;
    }
    res.changes.push_back(std::move(out));
  }

  for (const auto& [node, table] : proof.at) {
    const std::string& label = graph.nodes[node].name;
    std::vector<std::string> avars = assertion_vars(graph, node);
    std::string err;
    std::string text = concretize_assertion(table, avars, pm, &err);
    if (!err.empty()) return fail("assertion at " + label + ": " + err);
    res.proof.emplace_back(label, text);
  }
  return res;
}

}  // namespace bp
