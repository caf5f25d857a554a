#include "bprepair/hoare.h"

#include <stdexcept>

namespace bp {

namespace {

// Rows of the caller scope project onto globals+formals prefixes; exit
// assertions of callees use that projection.
uint64_t project_prefix(uint64_t val, size_t nbits) {
  return nbits >= 64 ? val : (val & ((1ull << nbits) - 1));
}

bool table_at(const Proof& proof, int node, uint64_t row, const TransitionGraph& g,
              std::string* err) {
  auto it = proof.at.find(node);
  if (it == proof.at.end()) {
    if (err) *err = "no assertion for cutpoint '" + g.nodes[node].name + "'";
    return false;
  }
  return it->second[row];
}

}  // namespace

std::vector<std::string> assertion_vars(const TransitionGraph& g, int node) {
  const Node& n = g.nodes[node];
  const Program& p = *g.program;
  if (n.is_exit && n.proc != 0) {
    std::vector<std::string> v;
    for (const auto& gv : p.globals) v.push_back(gv.name);
    for (const auto& f : p.procedures[n.proc].formals) v.push_back(f);
    return v;
  }
  return p.inscope(n.proc);
}

std::vector<bool> post_states(const TransitionGraph& g, const VerificationPath& path,
                              const std::vector<bool>& pre) {
  const Program& p = *g.program;
  int proc = g.nodes[path.from].proc;
  Scope sc = Scope::for_proc(p, proc);
  std::vector<bool> cur = pre;
  for (int ei : path.edges) {
    const Edge& e = g.edges[ei];
    std::vector<bool> next(cur.size(), false);
    for (uint64_t w = 0; w < cur.size(); ++w) {
      if (!cur[w]) continue;
      switch (e.act.kind) {
        case ActKind::Skip:
        case ActKind::Return:
          next[w] = true;
          break;
        case ActKind::Assume:
        case ActKind::AssertPass:
          if (eval_bits(e.act.guard, w, sc)) next[w] = true;
          break;
        case ActKind::Assign: {
          const Statement& s = *e.act.stmt;
          std::vector<std::vector<bool>> choices;
          for (const auto& rhs : s.rhs) choices.push_back(possible_bits(rhs, w, sc));
          std::vector<size_t> pick(choices.size(), 0);
          for (;;) {
            uint64_t v = w;
            for (size_t k = 0; k < s.targets.size(); ++k) {
              int bit = sc.index.at(s.targets[k]);
              if (choices[k][pick[k]])
                v |= 1ull << bit;
              else
                v &= ~(1ull << bit);
            }
            next[v] = true;
            size_t k = 0;
            while (k < pick.size() && ++pick[k] == choices[k].size()) pick[k++] = 0;
            if (k == pick.size()) break;
          }
          break;
        }
        case ActKind::Call:
          throw std::logic_error("post_states: call edges are separate paths");
        case ActKind::AssertFail:
          throw std::logic_error("post_states: fail edges never occur on paths");
      }
    }
    cur = std::move(next);
  }
  return cur;
}

std::optional<std::string> check_proof(const TransitionGraph& g, const std::vector<int>& cutset,
                                       const std::vector<VerificationPath>& paths,
                                       const Proof& proof) {
  const Program& p = *g.program;
  std::string err;

  // Tables must exist and have the right width.
  for (int c : cutset) {
    auto it = proof.at.find(c);
    if (it == proof.at.end()) return "no assertion for cutpoint '" + g.nodes[c].name + "'";
    size_t want = 1ull << assertion_vars(g, c).size();
    if (it->second.size() != want)
      return "assertion at '" + g.nodes[c].name + "' has " +
             std::to_string(it->second.size()) + " rows, expected " + std::to_string(want);
  }

  // All states are initial, so main's entry assertion must accept them all.
  {
    const TruthTable& t = proof.at.at(g.entry[0]);
    for (uint64_t w = 0; w < t.size(); ++w)
      if (!t[w])
        return "entry assertion of main rejects an initial state (row " + std::to_string(w) +
               ")";
  }

  // Assert cutpoints must imply their guards (error-freedom).
  for (int c : cutset) {
    const Node& n = g.nodes[c];
    if (!n.stmt || n.stmt->stmt.kind != StmtKind::Assert) continue;
    Scope sc = Scope::for_proc(p, n.proc);
    const TruthTable& t = proof.at.at(c);
    for (uint64_t w = 0; w < t.size(); ++w)
      if (t[w] && !eval_bits(n.stmt->stmt.guard, w, sc))
        return "assertion at '" + n.name + "' admits a state that violates the assert (" +
               val_to_string(w, sc) + ")";
  }

  for (const auto& path : paths) {
    const Node& from = g.nodes[path.from];
    const Node& to = g.nodes[path.to];
    const Edge& first = g.edges[path.edges.front()];

    if (first.act.kind == ActKind::Call) {
      const Statement& s = *first.act.stmt;
      int cj = p.procedure_index(s.callee);
      Scope caller = Scope::for_proc(p, from.proc);
      size_t ng = p.globals.size();
      size_t nf = p.procedures[cj].formals.size();
      size_t ndecl = p.procedures[cj].decls.size();
      const TruthTable& pre_t = proof.at.at(path.from);
      const TruthTable& post_t = proof.at.at(path.to);

      // Caller assertion pushes into the callee entry for every value of the
      // callee's non-formal locals.
      for (uint64_t w = 0; w < pre_t.size(); ++w) {
        if (!pre_t[w]) continue;
        uint64_t base = project_prefix(w, ng);
        for (size_t k = 0; k < nf; ++k)
          if (eval_bits(s.rhs[k], w, caller)) base |= 1ull << (ng + k);
        for (uint64_t m = 0; m < (1ull << ndecl); ++m) {
          uint64_t row = base | (m << (ng + nf));
          if (!table_at(proof, g.entry[cj], row, g, &err))
            return err.empty() ? "call into '" + s.callee + "' leaves '" +
                                     g.nodes[g.entry[cj]].name +
                                     "' assertion unsatisfied (from " +
                                     val_to_string(w, caller) + ")"
                               : err;
        }
      }
      // Whatever the exit assertion says about globals and arguments must
      // transfer to the return node, for every post-call valuation.
      size_t to_bits = assertion_vars(g, path.to).size();
      for (uint64_t w = 0; w < (1ull << caller.vars.size()); ++w) {
        uint64_t row = project_prefix(w, ng);
        for (size_t k = 0; k < nf; ++k)
          if (eval_bits(s.rhs[k], w, caller)) row |= 1ull << (ng + k);
        if (table_at(proof, g.exits[cj], row, g, &err) && !post_t[project_prefix(w, to_bits)])
          return "return from '" + s.callee + "' does not establish the assertion at '" +
                 to.name + "' (" + val_to_string(w, caller) + ")";
        if (!err.empty()) return err;
      }
      continue;
    }

    // Ordinary path: push the source assertion forward and compare.
    const TruthTable& pre_t = proof.at.at(path.from);
    std::vector<bool> pre(pre_t.begin(), pre_t.end());
    std::vector<bool> post = post_states(g, path, pre);
    size_t proj_bits = assertion_vars(g, path.to).size();
    const TruthTable& post_t = proof.at.at(path.to);
    Scope sc = Scope::for_proc(p, from.proc);
    for (uint64_t w = 0; w < post.size(); ++w) {
      if (!post[w]) continue;
      if (!post_t[project_prefix(w, proj_bits)])
        return "path " + path_to_string(g, path) + " reaches " + val_to_string(w, sc) +
               ", which the assertion at '" + to.name + "' rejects";
    }
  }
  return std::nullopt;
}

}  // namespace bp
