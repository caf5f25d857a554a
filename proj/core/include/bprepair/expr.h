#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace bp {

// Boolean expression trees. Immutable, shared via shared_ptr.
// Star is the nondeterministic expression; Choose(e1,e2) evaluates to true if
// e1 holds, else false if e2 holds, else behaves like Star.
// UnknownRef is an uninterpreted placeholder used only by the verification-
// condition machinery; the parser never produces it.
enum class ExprKind {
  True, False, Var, Not, And, Or, Implies, Eq, Neq, Star, Choose, UnknownRef
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind;
  std::string name;  // Var: variable name; UnknownRef: placeholder id
  ExprPtr a, b;      // operands (Not uses a; binary ops use a,b)
};

ExprPtr mk_true();
ExprPtr mk_false();
ExprPtr mk_bool(bool v);
ExprPtr mk_var(std::string name);
ExprPtr mk_not(ExprPtr a);
ExprPtr mk_and(ExprPtr a, ExprPtr b);
ExprPtr mk_or(ExprPtr a, ExprPtr b);
ExprPtr mk_implies(ExprPtr a, ExprPtr b);
ExprPtr mk_eq(ExprPtr a, ExprPtr b);
ExprPtr mk_neq(ExprPtr a, ExprPtr b);
ExprPtr mk_star();
ExprPtr mk_choose(ExprPtr a, ExprPtr b);
ExprPtr mk_unknown_ref(std::string id);

// Conjunction / disjunction over a list; empty list gives the unit.
ExprPtr mk_and_all(const std::vector<ExprPtr>& es);
ExprPtr mk_or_all(const std::vector<ExprPtr>& es);

bool contains_star_or_choose(const ExprPtr& e);
bool contains_unknown_ref(const ExprPtr& e);
// Deterministic: no Star, Choose, or UnknownRef anywhere.
bool is_deterministic(const ExprPtr& e);

void collect_vars(const ExprPtr& e, std::vector<std::string>& out);  // dedup, first-seen order

// Structural equality (kind/name/children).
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

using Env = std::unordered_map<std::string, bool>;

// Evaluation of a deterministic expression; throws std::out_of_range on an
// unbound variable and std::logic_error on Star/Choose/UnknownRef.
bool eval(const ExprPtr& e, const Env& env);

// Possible values of a (possibly nondeterministic) expression under env.
struct ValueSet {
  bool can_true = false;
  bool can_false = false;
};
ValueSet possible_values(const ExprPtr& e, const Env& env);

// Truth tables over an ordered variable list: row index r encodes the
// valuation where vars[i] = bit i of r (vars[0] is the least significant bit).
using TruthTable = std::vector<bool>;

Env row_env(const std::vector<std::string>& vars, std::uint32_t row);
std::uint32_t env_row(const std::vector<std::string>& vars, const Env& env);
TruthTable truth_table(const ExprPtr& e, const std::vector<std::string>& vars);
bool equivalent(const ExprPtr& a, const ExprPtr& b, const std::vector<std::string>& vars);

// Two-level minimization (Quine-McCluskey with a greedy essential cover).
// Returns a disjunction of conjunctions of literals, or true/false constants.
// Deterministic output; vars.size() <= 16 (callers keep it <= 8).
ExprPtr synthesize_from_table(const TruthTable& table, const std::vector<std::string>& vars);

// Canonical infix rendering: ! > & > | > '=>' > '='/'!='; parenthesizes
// exactly where reparsing needs it.
std::string expr_to_string(const ExprPtr& e);

// Parse an expression in the same grammar the program parser uses.
// Returns nullptr and fills err on failure.
ExprPtr parse_expr_text(const std::string& text, std::string* err);

}  // namespace bp
