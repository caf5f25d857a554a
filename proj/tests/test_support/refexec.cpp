#include "refexec.h"

#include <deque>

namespace testsup {

bp::Env unpack_env(const std::vector<std::string>& vars, uint64_t val) {
  bp::Env env;
  for (size_t i = 0; i < vars.size(); ++i) env[vars[i]] = (val >> i) & 1;
  return env;
}

uint64_t pack_env(const std::vector<std::string>& vars, const bp::Env& env) {
  uint64_t val = 0;
  for (size_t i = 0; i < vars.size(); ++i)
    if (env.at(vars[i])) val |= uint64_t(1) << i;
  return val;
}

std::vector<uint64_t> assign_images(const bp::Statement& s, const bp::Env& env,
                                    const std::vector<std::string>& vars, uint64_t val) {
  std::vector<uint64_t> out{val};
  for (size_t i = 0; i < s.targets.size(); ++i) {
    size_t bit = 0;
    while (bit < vars.size() && vars[bit] != s.targets[i]) ++bit;
    bp::ValueSet vs = bp::possible_values(s.rhs[i], env);
    std::vector<uint64_t> next;
    for (uint64_t v : out) {
      if (vs.can_true) next.push_back(v | (uint64_t(1) << bit));
      if (vs.can_false) next.push_back(v & ~(uint64_t(1) << bit));
    }
    out = std::move(next);
  }
  return out;
}

RefResult ref_explore(const bp::TransitionGraph& g) {
  RefResult res;
  const bp::Program& p = *g.program;
  std::vector<std::string> scope = p.inscope(0);
  std::deque<std::pair<int, uint64_t>> work;

  int entry = g.entry[0];
  for (uint64_t v = 0; v < (uint64_t(1) << scope.size()); ++v) {
    work.emplace_back(entry, v);
    res.reached.emplace(entry, v);
  }

  while (!work.empty()) {
    auto [n, val] = work.front();
    work.pop_front();
    const bp::Node& node = g.nodes[n];
    if (node.is_err) {
      res.error_reached = true;
      continue;
    }
    if (node.is_exit) continue;
    bp::Env env = unpack_env(scope, val);

    bool moved = false;
    auto push = [&](int to, uint64_t v) {
      moved = true;
      if (res.reached.emplace(to, v).second) work.emplace_back(to, v);
    };
    for (int ei : node.out) {
      const bp::Edge& e = g.edges[ei];
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
          res.unsupported = true;
          moved = true;
          break;
      }
    }
    if (!moved) res.stuck_reached = true;
  }
  return res;
}

bp::TruthTable ref_states_at(const RefResult& r, const bp::TransitionGraph& g, int node) {
  std::vector<std::string> scope = g.program->inscope(g.nodes[node].proc);
  bp::TruthTable table(size_t(1) << scope.size(), false);
  for (const auto& [n, val] : r.reached)
    if (n == node) table[val] = true;
  return table;
}

}  // namespace testsup
