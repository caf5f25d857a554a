#include "bprepair/expr.h"

#include <algorithm>
#include <bit>
#include <set>
#include <stdexcept>

namespace bp {

static ExprPtr node(ExprKind k, std::string name = {}, ExprPtr a = nullptr, ExprPtr b = nullptr) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->name = std::move(name);
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

ExprPtr mk_true() {
  static const ExprPtr t = node(ExprKind::True);
  return t;
}
ExprPtr mk_false() {
  static const ExprPtr f = node(ExprKind::False);
  return f;
}
ExprPtr mk_bool(bool v) { return v ? mk_true() : mk_false(); }
ExprPtr mk_var(std::string name) { return node(ExprKind::Var, std::move(name)); }
ExprPtr mk_not(ExprPtr a) { return node(ExprKind::Not, {}, std::move(a)); }
ExprPtr mk_and(ExprPtr a, ExprPtr b) { return node(ExprKind::And, {}, std::move(a), std::move(b)); }
ExprPtr mk_or(ExprPtr a, ExprPtr b) { return node(ExprKind::Or, {}, std::move(a), std::move(b)); }
ExprPtr mk_implies(ExprPtr a, ExprPtr b) {
  return node(ExprKind::Implies, {}, std::move(a), std::move(b));
}
ExprPtr mk_eq(ExprPtr a, ExprPtr b) { return node(ExprKind::Eq, {}, std::move(a), std::move(b)); }
ExprPtr mk_neq(ExprPtr a, ExprPtr b) { return node(ExprKind::Neq, {}, std::move(a), std::move(b)); }
ExprPtr mk_star() { return node(ExprKind::Star); }
ExprPtr mk_choose(ExprPtr a, ExprPtr b) {
  return node(ExprKind::Choose, {}, std::move(a), std::move(b));
}
ExprPtr mk_unknown_ref(std::string id) { return node(ExprKind::UnknownRef, std::move(id)); }

ExprPtr mk_and_all(const std::vector<ExprPtr>& es) {
  if (es.empty()) return mk_true();
  ExprPtr r = es[0];
  for (size_t i = 1; i < es.size(); ++i) r = mk_and(r, es[i]);
  return r;
}
ExprPtr mk_or_all(const std::vector<ExprPtr>& es) {
  if (es.empty()) return mk_false();
  ExprPtr r = es[0];
  for (size_t i = 1; i < es.size(); ++i) r = mk_or(r, es[i]);
  return r;
}

bool contains_star_or_choose(const ExprPtr& e) {
  if (!e) return false;
  if (e->kind == ExprKind::Star || e->kind == ExprKind::Choose) return true;
  return contains_star_or_choose(e->a) || contains_star_or_choose(e->b);
}

bool contains_unknown_ref(const ExprPtr& e) {
  if (!e) return false;
  if (e->kind == ExprKind::UnknownRef) return true;
  return contains_unknown_ref(e->a) || contains_unknown_ref(e->b);
}

bool is_deterministic(const ExprPtr& e) {
  return !contains_star_or_choose(e) && !contains_unknown_ref(e);
}

void collect_vars(const ExprPtr& e, std::vector<std::string>& out) {
  if (!e) return;
  if (e->kind == ExprKind::Var) {
    if (std::find(out.begin(), out.end(), e->name) == out.end()) out.push_back(e->name);
    return;
  }
  collect_vars(e->a, out);
  collect_vars(e->b, out);
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->name != b->name) return false;
  return expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
}

bool eval(const ExprPtr& e, const Env& env) {
  switch (e->kind) {
    case ExprKind::True: return true;
    case ExprKind::False: return false;
    case ExprKind::Var: return env.at(e->name);
    case ExprKind::Not: return !eval(e->a, env);
    case ExprKind::And: return eval(e->a, env) && eval(e->b, env);
    case ExprKind::Or: return eval(e->a, env) || eval(e->b, env);
    case ExprKind::Implies: return !eval(e->a, env) || eval(e->b, env);
    case ExprKind::Eq: return eval(e->a, env) == eval(e->b, env);
    case ExprKind::Neq: return eval(e->a, env) != eval(e->b, env);
    default: throw std::logic_error("eval on nondeterministic expression");
  }
}

ValueSet possible_values(const ExprPtr& e, const Env& env) {
  switch (e->kind) {
    case ExprKind::Star: return {true, true};
    case ExprKind::Choose: {
      // choose(e1,e2): true if e1, else false if e2, else nondeterministic.
      if (eval(e->a, env)) return {true, false};
      if (eval(e->b, env)) return {false, true};
      return {true, true};
    }
    default: {
      bool v = eval(e, env);
      return {v, !v};
    }
  }
}

Env row_env(const std::vector<std::string>& vars, std::uint32_t row) {
  Env env;
  for (size_t i = 0; i < vars.size(); ++i) env[vars[i]] = (row >> i) & 1u;
  return env;
}

std::uint32_t env_row(const std::vector<std::string>& vars, const Env& env) {
  std::uint32_t row = 0;
  for (size_t i = 0; i < vars.size(); ++i)
    if (env.at(vars[i])) row |= 1u << i;
  return row;
}

TruthTable truth_table(const ExprPtr& e, const std::vector<std::string>& vars) {
  TruthTable t(size_t{1} << vars.size());
  for (std::uint32_t r = 0; r < t.size(); ++r) t[r] = eval(e, row_env(vars, r));
  return t;
}

bool equivalent(const ExprPtr& a, const ExprPtr& b, const std::vector<std::string>& vars) {
  return truth_table(a, vars) == truth_table(b, vars);
}

namespace {

struct Cube {
  std::uint32_t bits = 0;  // values of fixed positions
  std::uint32_t mask = 0;  // 1 = position fixed
  friend bool operator<(const Cube& x, const Cube& y) {
    if (x.mask != y.mask) return x.mask < y.mask;
    return x.bits < y.bits;
  }
  friend bool operator==(const Cube& x, const Cube& y) {
    return x.mask == y.mask && x.bits == y.bits;
  }
};

bool cube_covers(const Cube& c, std::uint32_t minterm) {
  return (minterm & c.mask) == c.bits;
}

}  // namespace

ExprPtr synthesize_from_table(const TruthTable& table, const std::vector<std::string>& vars) {
  const size_t n = vars.size();
  if (table.size() != (size_t{1} << n)) throw std::logic_error("table size mismatch");
  std::vector<std::uint32_t> minterms;
  for (std::uint32_t r = 0; r < table.size(); ++r)
    if (table[r]) minterms.push_back(r);
  if (minterms.empty()) return mk_false();
  if (minterms.size() == table.size()) return mk_true();

  const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1);
  std::set<Cube> current;
  for (auto m : minterms) current.insert({m, full});
  std::vector<Cube> primes;
  while (!current.empty()) {
    std::set<Cube> next;
    std::set<Cube> combined;
    std::vector<Cube> cur(current.begin(), current.end());
    for (size_t i = 0; i < cur.size(); ++i)
      for (size_t j = i + 1; j < cur.size(); ++j) {
        if (cur[i].mask != cur[j].mask) continue;
        std::uint32_t diff = cur[i].bits ^ cur[j].bits;
        if (std::popcount(diff) != 1) continue;
        next.insert({cur[i].bits & ~diff, cur[i].mask & ~diff});
        combined.insert(cur[i]);
        combined.insert(cur[j]);
      }
    for (const auto& c : cur)
      if (!combined.count(c)) primes.push_back(c);
    current = std::move(next);
  }
  // Bigger cubes (fewer fixed bits) first, then canonical order.
  std::sort(primes.begin(), primes.end(), [](const Cube& x, const Cube& y) {
    int px = std::popcount(x.mask), py = std::popcount(y.mask);
    if (px != py) return px < py;
    return x < y;
  });

  std::vector<Cube> chosen;
  std::vector<bool> covered(minterms.size(), false);
  // Essential primes: minterms covered by exactly one prime.
  for (size_t mi = 0; mi < minterms.size(); ++mi) {
    const Cube* only = nullptr;
    int cnt = 0;
    for (const auto& p : primes)
      if (cube_covers(p, minterms[mi])) {
        ++cnt;
        only = &p;
      }
    if (cnt == 1 && std::find(chosen.begin(), chosen.end(), *only) == chosen.end())
      chosen.push_back(*only);
  }
  auto mark = [&](const Cube& c) {
    for (size_t mi = 0; mi < minterms.size(); ++mi)
      if (cube_covers(c, minterms[mi])) covered[mi] = true;
  };
  for (const auto& c : chosen) mark(c);
  // Greedy cover for the rest.
  for (;;) {
    size_t uncovered = std::count(covered.begin(), covered.end(), false);
    if (uncovered == 0) break;
    const Cube* best = nullptr;
    size_t best_gain = 0;
    for (const auto& p : primes) {
      if (std::find(chosen.begin(), chosen.end(), p) != chosen.end()) continue;
      size_t gain = 0;
      for (size_t mi = 0; mi < minterms.size(); ++mi)
        if (!covered[mi] && cube_covers(p, minterms[mi])) ++gain;
      if (gain > best_gain) {
        best_gain = gain;
        best = &p;
      }
    }
    if (!best) throw std::logic_error("cover construction failed");
    chosen.push_back(*best);
    mark(*best);
  }

  std::sort(chosen.begin(), chosen.end());
  std::vector<ExprPtr> disjuncts;
  for (const auto& c : chosen) {
    if (c.mask == 0) return mk_true();
    std::vector<ExprPtr> lits;
    for (size_t i = 0; i < n; ++i) {
      if (!((c.mask >> i) & 1u)) continue;
      ExprPtr v = mk_var(vars[i]);
      lits.push_back(((c.bits >> i) & 1u) ? v : mk_not(v));
    }
    disjuncts.push_back(mk_and_all(lits));
  }
  return mk_or_all(disjuncts);
}

namespace {

// Precedence: primary/! = 5, & = 4, | = 3, => = 2 (right), = and != = 1 (non-assoc).
int prec_of(ExprKind k) {
  switch (k) {
    case ExprKind::And: return 4;
    case ExprKind::Or: return 3;
    case ExprKind::Implies: return 2;
    case ExprKind::Eq:
    case ExprKind::Neq: return 1;
    default: return 5;
  }
}

void print_expr(const ExprPtr& e, int min_prec, std::string& out) {
  int p = prec_of(e->kind);
  bool parens = p < min_prec;
  if (parens) out += '(';
  switch (e->kind) {
    case ExprKind::True: out += "true"; break;
    case ExprKind::False: out += "false"; break;
    case ExprKind::Star: out += "*"; break;
    case ExprKind::Var: out += e->name; break;
    case ExprKind::UnknownRef:
      out += "?";
      out += e->name;
      break;
    case ExprKind::Not:
      out += '!';
      print_expr(e->a, 5, out);
      break;
    case ExprKind::Choose:
      out += "choose(";
      print_expr(e->a, 0, out);
      out += ", ";
      print_expr(e->b, 0, out);
      out += ')';
      break;
    case ExprKind::And:
      print_expr(e->a, 4, out);
      out += " & ";
      print_expr(e->b, 5, out);
      break;
    case ExprKind::Or:
      print_expr(e->a, 3, out);
      out += " | ";
      print_expr(e->b, 4, out);
      break;
    case ExprKind::Implies:
      print_expr(e->a, 3, out);
      out += " => ";
      print_expr(e->b, 2, out);
      break;
    case ExprKind::Eq:
    case ExprKind::Neq:
      print_expr(e->a, 2, out);
      out += e->kind == ExprKind::Eq ? " = " : " != ";
      print_expr(e->b, 2, out);
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string expr_to_string(const ExprPtr& e) {
  std::string out;
  print_expr(e, 0, out);
  return out;
}

}  // namespace bp
