#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bprepair/rational.h"

namespace bp {

enum class Sort { Int, Real };

// Linear term c0 + sum of coeff*var with exact rational coefficients.
// Zero coefficients are never stored.
struct LinTerm {
  Rational constant;
  std::map<std::string, Rational> coeffs;

  LinTerm() = default;
  explicit LinTerm(Rational c) : constant(c) {}

  static LinTerm variable(const std::string& name) {
    LinTerm t;
    t.coeffs[name] = Rational(1);
    return t;
  }

  bool is_constant() const { return coeffs.empty(); }
  bool is_variable(const std::string& name) const {
    return constant.is_zero() && coeffs.size() == 1 && coeffs.count(name) &&
           coeffs.at(name) == Rational(1);
  }

  void add_coeff(const std::string& name, const Rational& c);
};

LinTerm operator+(const LinTerm& a, const LinTerm& b);
LinTerm operator-(const LinTerm& a, const LinTerm& b);
LinTerm operator-(const LinTerm& a);
LinTerm operator*(const Rational& k, const LinTerm& t);
bool operator==(const LinTerm& a, const LinTerm& b);

// Replace each mapped variable by a term; unmapped variables stay themselves.
LinTerm subst_term(const LinTerm& t, const std::map<std::string, LinTerm>& sub);

Rational eval_term(const LinTerm& t, const std::map<std::string, Rational>& env);

// Renders "2*x - y + 3" style; empty term renders "0".
std::string term_to_string(const LinTerm& t);

// Comparison against zero; every atom is stored as term op 0.
enum class CmpOp { Le, Lt, Eq };

struct CAtom {
  LinTerm term;
  CmpOp op = CmpOp::Le;
};

// Scale to coprime integer coefficients; Eq additionally flips sign so the
// first variable coefficient is positive (Le/Lt scaling is sign-preserving).
// Two atoms denote the same set iff their normal forms are identical.
CAtom normalize_atom(const CAtom& a);
bool catom_equal(const CAtom& a, const CAtom& b);

// Formulas over linear atoms. Implication and iff are expanded at
// construction time, so only these kinds exist in trees.
enum class CKind { True, False, Atom, Not, And, Or };

struct CFormula;
using CFormulaPtr = std::shared_ptr<const CFormula>;

struct CFormula {
  CKind kind = CKind::True;
  CAtom atom;       // Atom only
  CFormulaPtr a, b; // Not uses a; And/Or use a,b
};

CFormulaPtr cf_true();
CFormulaPtr cf_false();
CFormulaPtr cf_bool(bool v);
CFormulaPtr cf_atom(CAtom at);
CFormulaPtr cf_atom(LinTerm t, CmpOp op);
CFormulaPtr cf_not(CFormulaPtr a);
CFormulaPtr cf_and(CFormulaPtr a, CFormulaPtr b);
CFormulaPtr cf_or(CFormulaPtr a, CFormulaPtr b);
CFormulaPtr cf_iff(CFormulaPtr a, CFormulaPtr b);
CFormulaPtr cf_and_all(const std::vector<CFormulaPtr>& fs);
CFormulaPtr cf_or_all(const std::vector<CFormulaPtr>& fs);

bool cformula_equal(const CFormulaPtr& a, const CFormulaPtr& b);

void collect_cvars(const CFormulaPtr& f, std::vector<std::string>& out);  // dedup, sorted

// Substitute terms for variables in every atom simultaneously.
CFormulaPtr subst_formula(const CFormulaPtr& f, const std::map<std::string, LinTerm>& sub);

bool eval_cformula(const CFormulaPtr& f, const std::map<std::string, Rational>& env);

// Infix grammar (also what the parser accepts):
//   formula := disj | disj '=>' formula
//   disj    := conj ('|' conj)*
//   conj    := neg ('&' neg)*
//   neg     := '!' neg | 'true' | 'false' | '(' formula ')' | atom
//   atom    := term cmp term          cmp in { <, <=, ==, !=, >, >= }
//   term    := ['-'] prod (('+'|'-') prod)*
//   prod    := num ['*' var] | var ['*' num]
//   num     := integer | integer '/' integer
// Printing uses <, <=, ==, !=, >, >= and never emits '=>'.
std::string cformula_to_string(const CFormulaPtr& f);
CFormulaPtr parse_cformula_text(const std::string& text, std::string* err);

// Equivalence-preserving cleanup: atom normalization, constant folding,
// flattening with idempotence/absorption/complement rules, and exact
// interval analysis when the formula mentions at most one variable
// (respecting that variable's sort, so x<=0 | x>=1 folds to true over Int).
CFormulaPtr simplify_cformula(const CFormulaPtr& f, const std::map<std::string, Sort>& sorts);

}  // namespace bp
