#include "bprepair/cfg.h"

#include <algorithm>
#include <map>
#include <set>

#include "bprepair/printer.h"

namespace bp {

namespace {

struct Builder {
  TransitionGraph& g;
  const Program& p;
  std::vector<std::map<std::string, int>> label_node;  // per procedure
  int cur_proc = 0;

  int node_of(const LabeledStatement& ls) const {
    return label_node[cur_proc].at(ls.label);
  }

  void add_edge(int from, int to, EdgeAction act, bool from_branch = false,
                bool tside = false) {
    Edge e;
    e.from = from;
    e.to = to;
    e.act = std::move(act);
    e.from_branch = from_branch;
    e.tside = tside;
    int idx = static_cast<int>(g.edges.size());
    g.edges.push_back(std::move(e));
    g.nodes[from].out.push_back(idx);
    g.nodes[to].in.push_back(idx);
  }

  void lower_seq(const std::vector<LabeledStatement>& body, int follow) {
    for (size_t i = 0; i < body.size(); ++i) {
      int next = i + 1 < body.size() ? node_of(body[i + 1]) : follow;
      lower_stmt(body[i], next);
    }
  }

  void lower_stmt(const LabeledStatement& ls, int next) {
    int self = node_of(ls);
    const Statement& s = ls.stmt;
    switch (s.kind) {
      case StmtKind::Skip:
        add_edge(self, next, {ActKind::Skip, nullptr, nullptr});
        break;
      case StmtKind::Return:
        add_edge(self, g.exits[cur_proc], {ActKind::Return, nullptr, nullptr});
        break;
      case StmtKind::Assign:
        add_edge(self, next, {ActKind::Assign, nullptr, &s});
        break;
      case StmtKind::Call:
        add_edge(self, next, {ActKind::Call, nullptr, &s});
        break;
      case StmtKind::Assume:
        add_edge(self, next, {ActKind::Assume, s.guard, nullptr}, false, true);
        break;
      case StmtKind::Assert:
        add_edge(self, next, {ActKind::AssertPass, s.guard, nullptr});
        add_edge(self, g.err, {ActKind::AssertFail, s.guard, nullptr});
        break;
      case StmtKind::Goto:
        for (const auto& t : s.labels)
          add_edge(self, label_node[cur_proc].at(t), {ActKind::Skip, nullptr, nullptr});
        break;
      case StmtKind::IfJump:
      case StmtKind::If:
      case StmtKind::While: {
        bool star = s.guard->kind == ExprKind::Star;
        ExprPtr tg = star ? mk_true() : s.guard;
        ExprPtr fg = star ? mk_true() : mk_not(s.guard);
        int ttarget, ftarget;
        if (s.kind == StmtKind::IfJump) {
          ttarget = label_node[cur_proc].at(s.labels[0]);
          ftarget = s.labels.size() > 1 ? label_node[cur_proc].at(s.labels[1]) : next;
        } else if (s.kind == StmtKind::If) {
          ttarget = node_of(s.then_body.front());
          ftarget = s.else_body.empty() ? next : node_of(s.else_body.front());
        } else {  // While
          ttarget = node_of(s.then_body.front());
          ftarget = next;
        }
        add_edge(self, ttarget, {ActKind::Assume, tg, nullptr}, true, true);
        add_edge(self, ftarget, {ActKind::Assume, fg, nullptr}, true, false);
        if (s.kind == StmtKind::If) {
          lower_seq(s.then_body, next);
          if (!s.else_body.empty()) lower_seq(s.else_body, next);
        } else if (s.kind == StmtKind::While) {
          lower_seq(s.then_body, self);  // final skip carries the back edge
        }
        break;
      }
    }
  }
};

// Nodes of one procedure reachable from `from`, following everything but
// assert fail edges; direction selects successors or predecessors.
std::vector<bool> reach(const TransitionGraph& g, int from, bool forward) {
  std::vector<bool> seen(g.nodes.size(), false);
  std::vector<int> work{from};
  seen[from] = true;
  while (!work.empty()) {
    int u = work.back();
    work.pop_back();
    const auto& idxs = forward ? g.nodes[u].out : g.nodes[u].in;
    for (int ei : idxs) {
      const Edge& e = g.edges[ei];
      if (e.act.kind == ActKind::AssertFail) continue;
      int v = forward ? e.to : e.from;
      if (!seen[v]) {
        seen[v] = true;
        work.push_back(v);
      }
    }
  }
  return seen;
}

// True if the subgraph induced by nodes outside `cut` is acyclic (assert
// fail edges ignored). On failure, `cycle` receives the offending cycle.
bool acyclic_outside(const TransitionGraph& g, const std::set<int>& cut,
                     std::vector<int>* cycle = nullptr) {
  enum { White, Gray, Black };
  std::vector<int> color(g.nodes.size(), White);
  std::vector<int> stack, edge_pos(g.nodes.size(), 0);
  for (size_t start = 0; start < g.nodes.size(); ++start) {
    if (color[start] != White || cut.count(static_cast<int>(start))) continue;
    stack.push_back(static_cast<int>(start));
    color[start] = Gray;
    while (!stack.empty()) {
      int u = stack.back();
      bool descended = false;
      while (edge_pos[u] < static_cast<int>(g.nodes[u].out.size())) {
        const Edge& e = g.edges[g.nodes[u].out[edge_pos[u]++]];
        if (e.act.kind == ActKind::AssertFail || cut.count(e.to)) continue;
        if (color[e.to] == Gray) {
          if (cycle) {
            auto it = std::find(stack.begin(), stack.end(), e.to);
            cycle->assign(it, stack.end());
          }
          return false;
        }
        if (color[e.to] == White) {
          color[e.to] = Gray;
          stack.push_back(e.to);
          descended = true;
          break;
        }
      }
      if (!descended && stack.back() == u) {
        color[u] = Black;
        stack.pop_back();
      }
    }
  }
  return true;
}

}  // namespace

int TransitionGraph::node_by_name(const std::string& name) const {
  for (const auto& n : nodes)
    if (n.name == name) return n.id;
  return -1;
}

std::string TransitionGraph::edge_label(const Edge& e) const {
  switch (e.act.kind) {
    case ActKind::Skip:
    case ActKind::Return: return "";
    case ActKind::Assume: return "assume(" + expr_to_string(e.act.guard) + ")";
    case ActKind::Assign:
    case ActKind::Call: return print_statement(*e.act.stmt);
    case ActKind::AssertPass: return "assume(" + expr_to_string(e.act.guard) + ")";
    case ActKind::AssertFail: return "assume(" + expr_to_string(mk_not(e.act.guard)) + ")";
  }
  return "";
}

std::string TransitionGraph::dot() const {
  std::string s = "digraph program {\n";
  for (const auto& n : nodes) {
    s += "  n" + std::to_string(n.id) + " [label=\"" + n.name + "\"";
    if (n.is_err) s += ", shape=octagon";
    if (n.is_exit) s += ", shape=doublecircle";
    s += "];\n";
  }
  for (const auto& e : edges) {
    s += "  n" + std::to_string(e.from) + " -> n" + std::to_string(e.to);
    std::string lab = edge_label(e);
    if (!lab.empty()) s += " [label=\"" + lab + "\"]";
    s += ";\n";
  }
  s += "}\n";
  return s;
}

std::optional<TransitionGraph> build_graph(const Program& p, DiagnosticSink& sink,
                                           const std::string& filename) {
  TransitionGraph g;
  g.program = &p;
  Builder b{g, p, {}, 0};
  b.label_node.resize(p.procedures.size());

  for (size_t pi = 0; pi < p.procedures.size(); ++pi) {
    for_each_statement(p.procedures[pi].body, [&](const LabeledStatement& ls) {
      Node n;
      n.id = static_cast<int>(g.nodes.size());
      n.name = ls.label;
      n.proc = static_cast<int>(pi);
      n.stmt = &ls;
      b.label_node[pi][ls.label] = n.id;
      g.nodes.push_back(n);
    });
    Node ex;
    ex.id = static_cast<int>(g.nodes.size());
    ex.name = "exit_" + p.procedures[pi].name;
    ex.proc = static_cast<int>(pi);
    ex.is_exit = true;
    g.exits.push_back(ex.id);
    g.nodes.push_back(ex);
  }
  Node err;
  err.id = static_cast<int>(g.nodes.size());
  err.name = "err";
  err.is_err = true;
  g.err = err.id;
  g.nodes.push_back(err);

  for (size_t pi = 0; pi < p.procedures.size(); ++pi) {
    b.cur_proc = static_cast<int>(pi);
    g.entry.push_back(b.node_of(p.procedures[pi].body.front()));
    b.lower_seq(p.procedures[pi].body, g.exits[pi]);
  }

  // Every statement node must lie on a path from its procedure entry to its
  // procedure exit (assert fail edges do not count).
  bool ok = true;
  for (size_t pi = 0; pi < p.procedures.size(); ++pi) {
    auto fwd = reach(g, g.entry[pi], true);
    auto bwd = reach(g, g.exits[pi], false);
    for (const auto& n : g.nodes) {
      if (n.proc != static_cast<int>(pi) || n.is_exit || !n.stmt) continue;
      if (!fwd[n.id] || !bwd[n.id]) {
        sink.error(filename, n.stmt->line, n.stmt->col, DiagCode::NodeOffEntryExitPath,
                   "location '" + n.name + "' is not on any entry-to-exit path of '" +
                       p.procedures[pi].name + "'");
        ok = false;
      }
    }
  }
  if (!ok) return std::nullopt;
  return g;
}

std::vector<int> compute_cutset(const TransitionGraph& g) {
  std::set<int> mandatory;
  for (size_t pi = 0; pi < g.entry.size(); ++pi) {
    mandatory.insert(g.entry[pi]);
    mandatory.insert(g.exits[pi]);
  }
  for (const auto& e : g.edges) {
    if (e.act.kind == ActKind::Call || e.act.kind == ActKind::AssertPass) {
      mandatory.insert(e.from);
      mandatory.insert(e.to);
    }
  }
  std::set<int> cut = mandatory;

  // Loop headers: targets of back edges with respect to dominators, computed
  // per procedure over nodes reachable from the entry.
  std::vector<int> extras;
  for (size_t pi = 0; pi < g.entry.size(); ++pi) {
    auto in_proc = reach(g, g.entry[pi], true);
    size_t n = g.nodes.size();
    std::vector<std::vector<bool>> dom(n, std::vector<bool>(n, true));
    std::vector<bool> none(n, false);
    for (size_t v = 0; v < n; ++v)
      if (!in_proc[v]) dom[v] = none;
    dom[g.entry[pi]] = none;
    dom[g.entry[pi]][g.entry[pi]] = true;
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t v = 0; v < n; ++v) {
        if (!in_proc[v] || static_cast<int>(v) == g.entry[pi]) continue;
        std::vector<bool> acc(n, true);
        bool any_pred = false;
        for (int ei : g.nodes[v].in) {
          const Edge& e = g.edges[ei];
          if (e.act.kind == ActKind::AssertFail || !in_proc[e.from]) continue;
          any_pred = true;
          for (size_t k = 0; k < n; ++k) acc[k] = acc[k] && dom[e.from][k];
        }
        if (!any_pred) std::fill(acc.begin(), acc.end(), false);
        acc[v] = true;
        if (acc != dom[v]) {
          dom[v] = std::move(acc);
          changed = true;
        }
      }
    }
    for (const auto& e : g.edges) {
      if (e.act.kind == ActKind::AssertFail) continue;
      if (in_proc[e.from] && in_proc[e.to] && dom[e.from][e.to] && !cut.count(e.to)) {
        cut.insert(e.to);
        extras.push_back(e.to);
      }
    }
  }

  // Irreducible leftovers: break any remaining cycle at its smallest node.
  std::vector<int> cycle;
  while (!acyclic_outside(g, cut, &cycle)) {
    int pick = *std::min_element(cycle.begin(), cycle.end());
    cut.insert(pick);
    extras.push_back(pick);
    cycle.clear();
  }

  // Drop extras that are not needed to keep every cycle cut.
  std::sort(extras.begin(), extras.end(), std::greater<int>());
  for (int v : extras) {
    cut.erase(v);
    if (!acyclic_outside(g, cut)) cut.insert(v);
  }

  return std::vector<int>(cut.begin(), cut.end());
}

std::vector<VerificationPath> enumerate_verification_paths(const TransitionGraph& g,
                                                           const std::vector<int>& cutset,
                                                           DiagnosticSink& sink,
                                                           size_t cap_per_pair) {
  std::set<int> cut(cutset.begin(), cutset.end());
  std::vector<VerificationPath> out;
  std::map<std::pair<int, int>, size_t> pair_count;
  std::set<std::pair<int, int>> capped;

  for (int c : cutset) {
    std::vector<int> path;          // edge indices
    std::vector<bool> on_path(g.nodes.size(), false);
    std::function<void(int)> dfs = [&](int u) {
      on_path[u] = true;
      for (int ei : g.nodes[u].out) {
        const Edge& e = g.edges[ei];
        if (e.act.kind == ActKind::AssertFail) continue;
        path.push_back(ei);
        if (cut.count(e.to)) {
          auto key = std::make_pair(c, e.to);
          if (++pair_count[key] > cap_per_pair) {
            if (capped.insert(key).second)
              sink.error("<graph>", 0, 0, DiagCode::PathCapExceeded,
                         "more than " + std::to_string(cap_per_pair) +
                             " verification paths from '" + g.nodes[c].name + "' to '" +
                             g.nodes[e.to].name + "'");
          } else {
            out.push_back({c, e.to, path});
          }
        } else if (!on_path[e.to]) {
          dfs(e.to);
        }
        path.pop_back();
      }
      on_path[u] = false;
    };
    dfs(c);
  }
  return out;
}

std::string path_to_string(const TransitionGraph& g, const VerificationPath& p) {
  std::string s = g.nodes[p.from].name;
  for (int ei : p.edges) s += " -> " + g.nodes[g.edges[ei].to].name;
  return s;
}

}  // namespace bp
