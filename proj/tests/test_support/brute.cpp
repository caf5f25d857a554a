#include "brute.h"

#include <functional>
#include <map>
#include <unordered_set>
#include <vector>

#include "refexec.h"

namespace testsup {

namespace {

struct Loc {
  int node = -1;
  std::string label;
  std::vector<bp::UpdateSchema> options;  // non-identity choices
};

struct Search {
  const bp::TransitionGraph* g = nullptr;
  std::vector<std::string> scope;
  std::map<int, bp::UpdateSchema> plan;
  std::map<int, std::vector<int>> guard_tab;               // node -> row -> {-1,0,1}
  std::map<int, std::vector<std::vector<int>>> assign_tab; // node -> var -> row
  uint64_t steps = 0, max_steps = 0;
  bool overflow = false;

  enum class Out { Safe, Error, Need, Abort };
  struct Need {
    bool is_assign = false;
    int node = -1, var = 0;
    uint64_t row = 0;
  };
  Need need;

  int* need_slot() {
    return need.is_assign ? &assign_tab[need.node][need.var][need.row]
                          : &guard_tab[need.node][need.row];
  }

  // Demonic exploration from one initial valuation under the current partial
  // tables. Stops at the first err hit or the first unassigned table bit.
  Out exec(uint64_t init) {
    std::unordered_set<uint64_t> seen;
    std::vector<std::pair<int, uint64_t>> stack{{g->entry[0], init}};
    seen.insert((uint64_t(g->entry[0]) << 32) | init);
    while (!stack.empty()) {
      auto [n, val] = stack.back();
      stack.pop_back();
      const bp::Node& node = g->nodes[n];
      if (node.is_err) return Out::Error;
      if (node.is_exit) continue;
      if (++steps > max_steps) {
        overflow = true;
        return Out::Abort;
      }
      bp::Env env = unpack_env(scope, val);
      auto push = [&](int to, uint64_t v) {
        if (seen.insert((uint64_t(to) << 32) | v).second) stack.emplace_back(to, v);
      };

      auto it = plan.find(n);
      bp::UpdateSchema u = it == plan.end() ? bp::UpdateSchema::Id : it->second;
      if (u == bp::UpdateSchema::AssumeAssume) {
        int bit = guard_tab[n][val];
        if (bit < 0) {
          need = {false, n, 0, val};
          return Out::Need;
        }
        for (int ei : node.out) {
          const bp::Edge& e = g->edges[ei];
          if (e.tside == (bit == 1)) push(e.to, val);
        }
        continue;
      }
      if (u == bp::UpdateSchema::AssignAssign) {
        uint64_t nv = 0;
        bool incomplete = false;
        for (size_t k = 0; k < scope.size() && !incomplete; ++k) {
          int bit = assign_tab[n][k][val];
          if (bit < 0) {
            need = {true, n, int(k), val};
            incomplete = true;
          } else if (bit) {
            nv |= uint64_t(1) << k;
          }
        }
        if (incomplete) return Out::Need;
        push(g->edges[node.out[0]].to, nv);
        continue;
      }
      if (u == bp::UpdateSchema::AssignSkip || u == bp::UpdateSchema::AssumeSkip ||
          u == bp::UpdateSchema::CallSkip) {
        for (int ei : node.out) push(g->edges[ei].to, val);
        continue;
      }

      for (int ei : node.out) {
        const bp::Edge& e = g->edges[ei];
        switch (e.act.kind) {
          case bp::ActKind::Skip:
          case bp::ActKind::Return:
            push(e.to, val);
            break;
          case bp::ActKind::Assume:
            if (bp::possible_values(e.act.guard, env).can_true) push(e.to, val);
            break;
          case bp::ActKind::AssertPass:
            if (bp::eval(e.act.guard, env)) push(e.to, val);
            break;
          case bp::ActKind::AssertFail:
            if (!bp::eval(e.act.guard, env)) push(e.to, val);
            break;
          case bp::ActKind::Assign:
            for (uint64_t v : assign_images(*e.act.stmt, env, scope, val)) push(e.to, v);
            break;
          case bp::ActKind::Call:
            overflow = true;  // not modeled; ends in Inconclusive
            return Out::Abort;
        }
      }
    }
    return Out::Safe;
  }

  // Make initial valuations safe one at a time, branching on each consulted
  // unassigned bit. A Safe run consults assigned bits only, so it stays safe
  // under every extension and we can move on without revisiting.
  bool cover(size_t i, const std::vector<uint64_t>& inits) {
    if (i == inits.size()) return true;
    Out o = exec(inits[i]);
    if (o == Out::Safe) return cover(i + 1, inits);
    if (o != Out::Need) return false;
    Need n = need;
    int* slot = need.is_assign ? &assign_tab[n.node][n.var][n.row] : &guard_tab[n.node][n.row];
    for (int v : {1, 0}) {
      *slot = v;
      if (cover(i, inits)) return true;
      if (overflow) break;
    }
    slot = n.is_assign ? &assign_tab[n.node][n.var][n.row] : &guard_tab[n.node][n.row];
    *slot = -1;
    return false;
  }
};

}  // namespace

BruteVerdict brute_repairable(const bp::TransitionGraph& g, const bp::CostModel& cm,
                              int64_t budget, uint64_t max_steps) {
  bool has_call = false;
  bp::for_each_statement(*g.program, [&](const bp::LabeledStatement& ls) {
    if (ls.stmt.kind == bp::StmtKind::Call) has_call = true;
  });
  if (has_call) return BruteVerdict::Inconclusive;

  Search s;
  s.g = &g;
  s.scope = g.program->inscope(0);
  s.max_steps = max_steps;
  size_t rows = size_t(1) << s.scope.size();

  std::vector<Loc> locs;
  for (const bp::Node& n : g.nodes) {
    if (!n.stmt || n.proc != 0) continue;
    Loc loc;
    loc.node = n.id;
    loc.label = n.name;
    for (bp::UpdateSchema u : bp::applicable_schemas(n.stmt->stmt, cm))
      if (u != bp::UpdateSchema::Id) loc.options.push_back(u);
    if (!loc.options.empty()) locs.push_back(std::move(loc));
  }

  std::vector<uint64_t> inits(rows);
  for (size_t v = 0; v < rows; ++v) inits[v] = v;

  // Depth-first over schema assignments within budget.
  std::function<bool(size_t, int64_t)> choose = [&](size_t li, int64_t remaining) -> bool {
    if (li == locs.size()) {
      s.guard_tab.clear();
      s.assign_tab.clear();
      for (const auto& [node, u] : s.plan) {
        if (u == bp::UpdateSchema::AssumeAssume)
          s.guard_tab[node].assign(rows, -1);
        else if (u == bp::UpdateSchema::AssignAssign)
          s.assign_tab[node].assign(s.scope.size(), std::vector<int>(rows, -1));
      }
      return s.cover(0, inits);
    }
    if (choose(li + 1, remaining)) return true;
    for (bp::UpdateSchema u : locs[li].options) {
      int64_t c = cm.cost(u, locs[li].label);
      if (c > remaining) continue;
      s.plan[locs[li].node] = u;
      bool ok = choose(li + 1, remaining - c);
      s.plan.erase(locs[li].node);
      if (ok) return true;
    }
    return false;
  };

  if (choose(0, budget)) return BruteVerdict::Repairable;
  return s.overflow ? BruteVerdict::Inconclusive : BruteVerdict::Unrepairable;
}

}  // namespace testsup
