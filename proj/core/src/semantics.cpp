#include "bprepair/semantics.h"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>
#include <tuple>

namespace bp {

namespace {

struct Frame {
  int return_node = -1;
  uint64_t caller_val = 0;
  bool operator<(const Frame& o) const {
    return std::tie(return_node, caller_val) < std::tie(o.return_node, o.caller_val);
  }
  bool operator==(const Frame& o) const {
    return return_node == o.return_node && caller_val == o.caller_val;
  }
};

struct Config {
  int node = -1;
  uint64_t val = 0;
  std::vector<Frame> stack;
  bool operator<(const Config& o) const {
    return std::tie(node, val, stack) < std::tie(o.node, o.val, o.stack);
  }
};

struct Explorer {
  const TransitionGraph& g;
  const Program& p;
  const ExecOptions& opt;
  std::vector<Scope> scopes;

  std::vector<Config> configs;
  std::vector<int> parent;
  std::map<Config, int> seen;
  std::deque<int> frontier;

  bool bound_hit = false;
  int error_at = -1;  // config index at err
  int stuck_at = -1;  // config index of a blocked plain assume

  explicit Explorer(const TransitionGraph& g_, const ExecOptions& opt_)
      : g(g_), p(*g_.program), opt(opt_) {
    for (size_t i = 0; i < p.procedures.size(); ++i) scopes.push_back(Scope::for_proc(p, i));
  }

  void enqueue(Config c, int from) {
    auto [it, fresh] = seen.emplace(std::move(c), static_cast<int>(configs.size()));
    if (!fresh) return;
    configs.push_back(it->first);
    parent.push_back(from);
    frontier.push_back(it->second);
  }

  void expand(int ci) {
    // Copy: enqueue may grow `configs`.
    Config c = configs[ci];
    const Node& n = g.nodes[c.node];
    if (n.is_err) {
      if (error_at < 0) error_at = ci;
      return;
    }
    if (n.is_exit) {
      if (c.stack.empty()) return;  // main finished
      Frame f = c.stack.back();
      Config next;
      next.node = f.return_node;
      next.stack = c.stack;
      next.stack.pop_back();
      // Globals flow back; caller locals are restored.
      uint64_t gmask = (p.globals.size() >= 64) ? ~0ull : ((1ull << p.globals.size()) - 1);
      next.val = (c.val & gmask) | (f.caller_val & ~gmask);
      enqueue(std::move(next), ci);
      return;
    }
    const Scope& sc = scopes[n.proc];
    bool moved = false;
    for (int ei : n.out) {
      const Edge& e = g.edges[ei];
      switch (e.act.kind) {
        case ActKind::Skip:
        case ActKind::Return:
          enqueue({e.to, c.val, c.stack}, ci);
          moved = true;
          break;
        case ActKind::Assume:
          if (eval_bits(e.act.guard, c.val, sc)) {
            enqueue({e.to, c.val, c.stack}, ci);
            moved = true;
          }
          break;
        case ActKind::AssertPass:
          if (eval_bits(e.act.guard, c.val, sc)) {
            enqueue({e.to, c.val, c.stack}, ci);
            moved = true;
          }
          break;
        case ActKind::AssertFail:
          if (!eval_bits(e.act.guard, c.val, sc)) {
            enqueue({e.to, c.val, c.stack}, ci);
            moved = true;
          }
          break;
        case ActKind::Assign: {
          const Statement& s = *e.act.stmt;
          // All right-hand sides read the pre-state; targets update together.
          std::vector<std::vector<bool>> choices;
          for (const auto& rhs : s.rhs) choices.push_back(possible_bits(rhs, c.val, sc));
          std::vector<size_t> pick(choices.size(), 0);
          for (;;) {
            uint64_t v = c.val;
            for (size_t k = 0; k < s.targets.size(); ++k) {
              int bit = sc.index.at(s.targets[k]);
              if (choices[k][pick[k]])
                v |= 1ull << bit;
              else
                v &= ~(1ull << bit);
            }
            enqueue({e.to, v, c.stack}, ci);
            moved = true;
            size_t k = 0;
            while (k < pick.size() && ++pick[k] == choices[k].size()) pick[k++] = 0;
            if (k == pick.size()) break;
          }
          break;
        }
        case ActKind::Call: {
          const Statement& s = *e.act.stmt;
          if (c.stack.size() >= opt.max_stack) {
            bound_hit = true;
            break;
          }
          int cj = p.procedure_index(s.callee);
          const Scope& cs = scopes[cj];
          const Procedure& callee = p.procedures[cj];
          uint64_t gmask = (p.globals.size() >= 64) ? ~0ull : ((1ull << p.globals.size()) - 1);
          uint64_t base = c.val & gmask;
          for (size_t k = 0; k < callee.formals.size(); ++k)
            if (eval_bits(s.rhs[k], c.val, sc))
              base |= 1ull << cs.index.at(callee.formals[k]);
          // Non-formal callee locals start demonically.
          size_t extra = callee.decls.size();
          int first_extra = static_cast<int>(p.globals.size() + callee.formals.size());
          std::vector<Frame> stack = c.stack;
          stack.push_back({e.to, c.val});
          for (uint64_t m = 0; m < (1ull << extra); ++m) {
            uint64_t v = base | (m << first_extra);
            enqueue({g.entry[cj], v, stack}, ci);
          }
          moved = true;
          break;
        }
      }
    }
    if (!moved && n.stmt && n.stmt->stmt.kind == StmtKind::Assume && stuck_at < 0)
      stuck_at = ci;
  }

  Verdict run(const std::vector<Config>& initial) {
    for (const auto& c : initial) enqueue(c, -1);
    while (!frontier.empty()) {
      if (configs.size() > opt.max_configs) {
        bound_hit = true;
        break;
      }
      int ci = frontier.front();
      frontier.pop_front();
      expand(ci);
      if (error_at >= 0) break;
    }
    Verdict v;
    if (error_at >= 0) {
      v.kind = VerdictKind::ErrorReached;
      v.trace = trace_of(error_at);
      v.note = "assertion can fail";
    } else if (bound_hit) {
      v.kind = VerdictKind::BoundExceeded;
      v.note = "exploration bound reached; result inconclusive";
    } else if (opt.strict_stuck && stuck_at >= 0) {
      v.kind = VerdictKind::StuckReached;
      v.trace = trace_of(stuck_at);
      v.note = "a plain assume blocks every continuation";
    } else {
      v.kind = VerdictKind::PartiallyCorrect;
    }
    return v;
  }

  std::vector<TraceStep> trace_of(int ci) const {
    std::vector<TraceStep> t;
    for (int i = ci; i >= 0; i = parent[i]) t.push_back({configs[i].node, configs[i].val});
    std::reverse(t.begin(), t.end());
    return t;
  }
};

}  // namespace

Scope Scope::for_proc(const Program& p, size_t proc_index) {
  Scope sc;
  sc.vars = p.inscope(proc_index);
  for (size_t i = 0; i < sc.vars.size(); ++i) sc.index[sc.vars[i]] = static_cast<int>(i);
  return sc;
}

bool eval_bits(const ExprPtr& e, uint64_t val, const Scope& sc) {
  switch (e->kind) {
    case ExprKind::True: return true;
    case ExprKind::False: return false;
    case ExprKind::Var: return sc.bit(val, e->name);
    case ExprKind::Not: return !eval_bits(e->a, val, sc);
    case ExprKind::And: return eval_bits(e->a, val, sc) && eval_bits(e->b, val, sc);
    case ExprKind::Or: return eval_bits(e->a, val, sc) || eval_bits(e->b, val, sc);
    case ExprKind::Implies: return !eval_bits(e->a, val, sc) || eval_bits(e->b, val, sc);
    case ExprKind::Eq: return eval_bits(e->a, val, sc) == eval_bits(e->b, val, sc);
    case ExprKind::Neq: return eval_bits(e->a, val, sc) != eval_bits(e->b, val, sc);
    default: throw std::logic_error("eval_bits: nondeterministic expression");
  }
}

std::vector<bool> possible_bits(const ExprPtr& e, uint64_t val, const Scope& sc) {
  if (e->kind == ExprKind::Star) return {false, true};
  if (e->kind == ExprKind::Choose) {
    if (eval_bits(e->a, val, sc)) return {true};
    if (eval_bits(e->b, val, sc)) return {false};
    return {false, true};
  }
  return {eval_bits(e, val, sc)};
}

std::string val_to_string(uint64_t val, const Scope& sc) {
  std::string s;
  for (size_t i = 0; i < sc.vars.size(); ++i) {
    if (i) s += " ";
    s += sc.vars[i] + "=" + (((val >> i) & 1) ? "1" : "0");
  }
  return s;
}

const char* verdict_kind_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::PartiallyCorrect: return "partially-correct";
    case VerdictKind::ErrorReached: return "error-reached";
    case VerdictKind::StuckReached: return "stuck-reached";
    case VerdictKind::BoundExceeded: return "bound-exceeded";
  }
  return "?";
}

Verdict check_partial_correctness(const TransitionGraph& g, const ExecOptions& opt) {
  Explorer ex(g, opt);
  std::vector<Config> initial;
  size_t nvars = g.program->inscope(0).size();
  for (uint64_t v = 0; v < (1ull << nvars); ++v) initial.push_back({g.entry[0], v, {}});
  return ex.run(initial);
}

Verdict run_from(const TransitionGraph& g, uint64_t initial_val, const ExecOptions& opt) {
  Explorer ex(g, opt);
  return ex.run({{g.entry[0], initial_val, {}}});
}

std::string format_trace(const TransitionGraph& g, const Verdict& v) {
  std::string s;
  for (const auto& step : v.trace) {
    const Node& n = g.nodes[step.node];
    s += n.name;
    if (n.proc >= 0) {
      Scope sc = Scope::for_proc(*g.program, n.proc);
      s += "  [" + val_to_string(step.val, sc) + "]";
    }
    s += "\n";
  }
  return s;
}

}  // namespace bp
