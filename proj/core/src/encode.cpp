#include "bprepair/encode.h"

#include <algorithm>

#include "bprepair/semantics.h"

namespace bp {

namespace {

uint64_t prefix(uint64_t val, size_t nbits) {
  return nbits >= 64 ? val : (val & ((1ull << nbits) - 1));
}

// One explored execution branch during a path walk: the current valuation
// plus the conjunction of unknown-table literals this branch relies on.
struct Branch {
  uint64_t w = 0;
  std::vector<Lit> conds;
  bool operator<(const Branch& o) const { return std::tie(w, conds) < std::tie(o.w, o.conds); }
  bool operator==(const Branch& o) const { return w == o.w && conds == o.conds; }
};

struct Grounder {
  const TransitionGraph& g;
  const Program& p;
  const CostModel& cm;
  const EncodeOptions& opt;
  DiagnosticSink& sink;
  Encoding& enc;
  SatSolver& S;
  std::vector<Scope> scopes;
  std::vector<std::pair<Lit, int64_t>> terms;  // weighted selector costs
  bool failed = false;

  Grounder(const TransitionGraph& g_, const CostModel& cm_, const EncodeOptions& opt_,
           DiagnosticSink& sink_, Encoding& enc_)
      : g(g_), p(*g_.program), cm(cm_), opt(opt_), sink(sink_), enc(enc_), S(*enc_.solver) {
    for (size_t i = 0; i < p.procedures.size(); ++i) scopes.push_back(Scope::for_proc(p, i));
  }

  bool is_entry0(int node) const { return node == g.entry[0]; }

  // nullopt = the literal is the constant `true`
  std::optional<Lit> inv_lit(int node, uint64_t row) const {
    if (is_entry0(node)) return std::nullopt;
    return enc.invariant.at(node)[row];
  }

  void make_locations() {
    for (const auto& n : g.nodes) {
      if (!n.stmt) continue;
      LocationInfo loc;
      loc.node = n.id;
      for (UpdateSchema u : applicable_schemas(n.stmt->stmt, cm)) {
        int64_t c = cm.cost(u, n.name);
        if (c > enc.budget) continue;  // unaffordable even alone
        loc.schemas.push_back(u);
        loc.cost.push_back(c);
        loc.sel.push_back(S.new_var());
      }
      // exactly one schema per location
      S.add_clause(loc.sel);
      for (size_t i = 0; i < loc.sel.size(); ++i)
        for (size_t j = i + 1; j < loc.sel.size(); ++j)
          S.add_clause({-loc.sel[i], -loc.sel[j]});
      for (size_t i = 0; i < loc.sel.size(); ++i)
        if (loc.cost[i] > 0) terms.push_back({loc.sel[i], loc.cost[i]});

      const Scope& sc = scopes[n.proc];
      size_t rows = 1ull << sc.vars.size();
      for (size_t i = 0; i < loc.schemas.size(); ++i) {
        switch (loc.schemas[i]) {
          case UpdateSchema::AssumeAssume: {
            std::vector<Lit> t(rows);
            for (auto& v : t) v = S.new_var();
            enc.unknowns.guard[n.id] = std::move(t);
            break;
          }
          case UpdateSchema::AssignAssign: {
            std::vector<std::vector<Lit>> ts(sc.vars.size(), std::vector<Lit>(rows));
            for (auto& t : ts)
              for (auto& v : t) v = S.new_var();
            enc.unknowns.assign[n.id] = std::move(ts);
            break;
          }
          case UpdateSchema::CallCall: {
            size_t k = p.find_procedure(n.stmt->stmt.callee)->formals.size();
            std::vector<std::vector<Lit>> ts(k, std::vector<Lit>(rows));
            for (auto& t : ts)
              for (auto& v : t) v = S.new_var();
            enc.unknowns.callargs[n.id] = std::move(ts);
            break;
          }
          default: break;
        }
      }
      enc.loc_of_node[n.id] = static_cast<int>(enc.locations.size());
      enc.locations.push_back(std::move(loc));
    }
  }

  void make_invariants(const std::vector<int>& cutset) {
    for (int c : cutset) {
      if (is_entry0(c)) continue;  // pinned to `true`, all states are initial
      size_t rows = 1ull << assertion_vars(g, c).size();
      std::vector<Lit> t(rows);
      for (auto& v : t) v = S.new_var();
      enc.invariant[c] = std::move(t);
    }
  }

  // Sequential weighted counter: layer[j] = "the selected cost is >= j",
  // saturating at budget+1, which the final unit clause forbids.
  void make_budget_counter() {
    int64_t total = 0;
    for (auto& [l, w] : terms) total += w;
    if (total <= enc.budget) return;
    int64_t width = enc.budget + 1;
    std::vector<Lit> prev(width + 1, 0);  // 1-based, 0 = constant false
    for (auto& [t, w] : terms) {
      std::vector<Lit> curr(width + 1, 0);
      for (int64_t j = 1; j <= width; ++j) curr[j] = S.new_var();
      for (int64_t j = 1; j <= width; ++j) {
        if (prev[j]) S.add_clause({-prev[j], curr[j]});
        if (j <= w)
          S.add_clause({-t, curr[j]});
        else if (prev[j - w])
          S.add_clause({-t, -prev[j - w], curr[j]});
      }
      prev = std::move(curr);
    }
    S.add_clause({-prev[width]});
  }

  // Antecedent literals selecting this schema combination; locations with a
  // single schema impose nothing. Introduces a helper variable for long
  // conjunctions so path clauses stay short.
  std::vector<Lit> combo_antecedent(const std::vector<const LocationInfo*>& locs,
                                    const std::vector<size_t>& choice) {
    std::vector<Lit> sels;
    for (size_t d = 0; d < locs.size(); ++d)
      if (locs[d]->sel.size() > 1) sels.push_back(locs[d]->sel[choice[d]]);
    if (sels.size() < 4) {
      for (auto& l : sels) l = -l;  // clause form
      return sels;
    }
    Lit a = S.new_var();
    std::vector<Lit> def{a};
    for (Lit l : sels) def.push_back(-l);
    S.add_clause(def);  // conjunction implies the helper
    for (Lit l : sels) S.add_clause({-a, l});
    return {-a};
  }

  void walk_assign_known(const Statement& s, const Scope& sc, const Branch& b,
                         std::vector<Branch>& out) {
    std::vector<std::vector<bool>> choices;
    for (const auto& rhs : s.rhs) choices.push_back(possible_bits(rhs, b.w, sc));
    std::vector<size_t> pick(choices.size(), 0);
    for (;;) {
      uint64_t v = b.w;
      for (size_t k = 0; k < s.targets.size(); ++k) {
        int bit = sc.index.at(s.targets[k]);
        if (choices[k][pick[k]])
          v |= 1ull << bit;
        else
          v &= ~(1ull << bit);
      }
      out.push_back({v, b.conds});
      size_t k = 0;
      while (k < pick.size() && ++pick[k] == choices[k].size()) pick[k++] = 0;
      if (k == pick.size()) break;
    }
  }

  void emit_normal_combo(const VerificationPath& path,
                         const std::vector<const LocationInfo*>& locs,
                         const std::vector<size_t>& choice) {
    const Scope& sc = scopes[g.nodes[path.from].proc];
    size_t nvars = sc.vars.size();
    size_t to_bits = assertion_vars(g, path.to).size();
    std::vector<Lit> base = combo_antecedent(locs, choice);

    for (uint64_t w0 = 0; w0 < (1ull << nvars); ++w0) {
      std::vector<Branch> branches{{w0, {}}};
      for (size_t d = 0; d < path.edges.size() && !branches.empty(); ++d) {
        const Edge& e = g.edges[path.edges[d]];
        UpdateSchema u = locs[d]->schemas[choice[d]];
        std::vector<Branch> next;
        for (const Branch& b : branches) {
          switch (u) {
            case UpdateSchema::Id:
              switch (e.act.kind) {
                case ActKind::Skip:
                case ActKind::Return:
                  next.push_back(b);
                  break;
                case ActKind::Assume:
                case ActKind::AssertPass:
                  if (eval_bits(e.act.guard, b.w, sc)) next.push_back(b);
                  break;
                case ActKind::Assign:
                  walk_assign_known(*e.act.stmt, sc, b, next);
                  break;
                default: break;  // calls are their own paths
              }
              break;
            case UpdateSchema::AssumeSkip:
            case UpdateSchema::AssignSkip:
              next.push_back(b);
              break;
            case UpdateSchema::AssumeAssume: {
              Lit f = enc.unknowns.guard.at(locs[d]->node)[b.w];
              Branch nb = b;
              nb.conds.push_back(e.tside ? f : -f);
              next.push_back(std::move(nb));
              break;
            }
            case UpdateSchema::AssignAssign: {
              const auto& tables = enc.unknowns.assign.at(locs[d]->node);
              for (uint64_t v = 0; v < (1ull << nvars); ++v) {
                Branch nb = b;
                for (size_t i = 0; i < nvars; ++i) {
                  Lit f = tables[i][b.w];
                  nb.conds.push_back(((v >> i) & 1) ? f : -f);
                }
                nb.w = v;
                next.push_back(std::move(nb));
              }
              break;
            }
            default: break;
          }
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        if (next.size() > opt.max_branch_states) {
          sink.error("<encode>", 0, 0, DiagCode::BadInput,
                     "path walk exceeds " + std::to_string(opt.max_branch_states) +
                         " branches; scope too wide for ground encoding");
          failed = true;
          return;
        }
        branches = std::move(next);
      }

      auto from_lit = inv_lit(path.from, w0);
      for (const Branch& b : branches) {
        auto to_lit = inv_lit(path.to, prefix(b.w, to_bits));
        if (!to_lit) continue;  // consequent constant true
        std::vector<Lit> clause = base;
        if (from_lit) clause.push_back(-*from_lit);
        for (Lit c : b.conds) clause.push_back(-c);
        clause.push_back(*to_lit);
        S.add_clause(std::move(clause));
      }
    }
  }

  void emit_normal_path(const VerificationPath& path) {
    std::vector<const LocationInfo*> locs;
    for (int ei : path.edges) locs.push_back(&enc.locations[enc.loc_of_node.at(g.edges[ei].from)]);
    std::vector<size_t> choice(locs.size(), 0);
    // enumerate schema combinations, pruning those the budget cannot afford
    std::function<void(size_t, int64_t)> rec = [&](size_t d, int64_t cost) {
      if (failed) return;
      if (d == locs.size()) {
        emit_normal_combo(path, locs, choice);
        return;
      }
      for (size_t i = 0; i < locs[d]->schemas.size(); ++i) {
        int64_t c = cost + locs[d]->cost[i];
        if (c > enc.budget) continue;
        choice[d] = i;
        rec(d + 1, c);
      }
    };
    rec(0, 0);
  }

  void emit_assert_path(const VerificationPath& path) {
    const Edge& e = g.edges[path.edges.front()];
    const Scope& sc = scopes[g.nodes[path.from].proc];
    size_t to_bits = assertion_vars(g, path.to).size();
    for (uint64_t w = 0; w < (1ull << sc.vars.size()); ++w) {
      auto from_lit = inv_lit(path.from, w);
      if (!eval_bits(e.act.guard, w, sc)) {
        // the assertion must exclude states that violate the assert
        std::vector<Lit> clause;
        if (from_lit) clause.push_back(-*from_lit);
        S.add_clause(std::move(clause));  // empty = unrepairable
        continue;
      }
      auto to_lit = inv_lit(path.to, prefix(w, to_bits));
      if (!to_lit) continue;
      std::vector<Lit> clause;
      if (from_lit) clause.push_back(-*from_lit);
      clause.push_back(*to_lit);
      S.add_clause(std::move(clause));
    }
  }

  void emit_call_path(const VerificationPath& path) {
    const Edge& e = g.edges[path.edges.front()];
    const Statement& s = *e.act.stmt;
    const LocationInfo& loc = enc.locations[enc.loc_of_node.at(path.from)];
    int cj = p.procedure_index(s.callee);
    const Scope& caller = scopes[g.nodes[path.from].proc];
    size_t ng = p.globals.size();
    size_t nf = p.procedures[cj].formals.size();
    size_t ndecl = p.procedures[cj].decls.size();
    size_t to_bits = assertion_vars(g, path.to).size();
    size_t caller_rows = 1ull << caller.vars.size();

    for (size_t si = 0; si < loc.schemas.size(); ++si) {
      std::vector<Lit> base;
      if (loc.sel.size() > 1) base.push_back(-loc.sel[si]);
      switch (loc.schemas[si]) {
        case UpdateSchema::Id: {
          for (uint64_t w = 0; w < caller_rows; ++w) {
            uint64_t entry_base = prefix(w, ng);
            for (size_t k = 0; k < nf; ++k)
              if (eval_bits(s.rhs[k], w, caller)) entry_base |= 1ull << (ng + k);
            auto from_lit = inv_lit(path.from, w);
            // caller assertion pushes into the callee entry, all locals
            for (uint64_t m = 0; m < (1ull << ndecl); ++m) {
              auto to_lit = inv_lit(g.entry[cj], entry_base | (m << (ng + nf)));
              if (!to_lit) continue;
              std::vector<Lit> clause = base;
              if (from_lit) clause.push_back(-*from_lit);
              clause.push_back(*to_lit);
              S.add_clause(std::move(clause));
            }
            // callee exit knowledge transfers to the return node
            auto exit_lit = inv_lit(g.exits[cj], prefix(entry_base, ng + nf));
            auto ret_lit = inv_lit(path.to, prefix(w, to_bits));
            if (ret_lit) {
              std::vector<Lit> clause = base;
              if (exit_lit) clause.push_back(-*exit_lit);
              clause.push_back(*ret_lit);
              S.add_clause(std::move(clause));
            }
          }
          break;
        }
        case UpdateSchema::CallSkip: {
          // dropping the call leaves the assertion unchanged
          for (uint64_t w = 0; w < caller_rows; ++w) {
            auto from_lit = inv_lit(path.from, w);
            auto to_lit = inv_lit(path.to, prefix(w, to_bits));
            if (to_lit) {
              std::vector<Lit> clause = base;
              if (from_lit) clause.push_back(-*from_lit);
              clause.push_back(*to_lit);
              S.add_clause(std::move(clause));
            }
            if (from_lit) {
              std::vector<Lit> clause = base;
              if (to_lit) clause.push_back(-*to_lit);
              clause.push_back(*from_lit);
              S.add_clause(std::move(clause));
            }
          }
          break;
        }
        case UpdateSchema::CallCall: {
          const auto& args = enc.unknowns.callargs.at(path.from);
          for (uint64_t w = 0; w < caller_rows; ++w) {
            auto from_lit = inv_lit(path.from, w);
            for (uint64_t phi = 0; phi < (1ull << nf); ++phi) {
              std::vector<Lit> match;  // this argument vector is selected
              for (size_t k = 0; k < nf; ++k)
                match.push_back(((phi >> k) & 1) ? -args[k][w] : args[k][w]);
              uint64_t entry_base = prefix(w, ng) | (phi << ng);
              for (uint64_t m = 0; m < (1ull << ndecl); ++m) {
                auto to_lit = inv_lit(g.entry[cj], entry_base | (m << (ng + nf)));
                if (!to_lit) continue;
                std::vector<Lit> clause = base;
                if (from_lit) clause.push_back(-*from_lit);
                clause.insert(clause.end(), match.begin(), match.end());
                clause.push_back(*to_lit);
                S.add_clause(std::move(clause));
              }
              auto exit_lit = inv_lit(g.exits[cj], prefix(entry_base, ng + nf));
              auto ret_lit = inv_lit(path.to, prefix(w, to_bits));
              if (ret_lit) {
                std::vector<Lit> clause = base;
                clause.insert(clause.end(), match.begin(), match.end());
                if (exit_lit) clause.push_back(-*exit_lit);
                clause.push_back(*ret_lit);
                S.add_clause(std::move(clause));
              }
            }
          }
          break;
        }
        default: break;
      }
    }
  }

  void emit_path(const VerificationPath& path) {
    const Edge& first = g.edges[path.edges.front()];
    if (first.act.kind == ActKind::Call)
      emit_call_path(path);
    else if (first.act.kind == ActKind::AssertPass)
      emit_assert_path(path);
    else
      emit_normal_path(path);
  }
};

}  // namespace

std::optional<Encoding> encode_repair(const TransitionGraph& g, const std::vector<int>& cutset,
                                      const std::vector<VerificationPath>& paths,
                                      const CostModel& cm, const EncodeOptions& opt,
                                      DiagnosticSink& sink) {
  Encoding enc;
  enc.solver = std::make_unique<SatSolver>();
  enc.budget = opt.budget;
  Grounder gr(g, cm, opt, sink, enc);
  gr.make_locations();
  gr.make_invariants(cutset);
  for (const auto& path : paths) {
    gr.emit_path(path);
    if (gr.failed) return std::nullopt;
  }
  gr.make_budget_counter();
  enc.num_vars = enc.solver->num_vars();
  enc.num_clauses = enc.solver->num_clauses();
  return enc;
}

}  // namespace bp
