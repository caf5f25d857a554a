#include "bprepair/concrete.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>

namespace bp {

void LinTerm::add_coeff(const std::string& name, const Rational& c) {
  auto it = coeffs.find(name);
  if (it == coeffs.end()) {
    if (!c.is_zero()) coeffs.emplace(name, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) coeffs.erase(it);
}

LinTerm operator+(const LinTerm& a, const LinTerm& b) {
  LinTerm r = a;
  r.constant = r.constant + b.constant;
  for (const auto& [v, c] : b.coeffs) r.add_coeff(v, c);
  return r;
}

LinTerm operator-(const LinTerm& a, const LinTerm& b) { return a + (-b); }

LinTerm operator-(const LinTerm& a) {
  LinTerm r;
  r.constant = -a.constant;
  for (const auto& [v, c] : a.coeffs) r.coeffs.emplace(v, -c);
  return r;
}

LinTerm operator*(const Rational& k, const LinTerm& t) {
  LinTerm r;
  if (k.is_zero()) return r;
  r.constant = k * t.constant;
  for (const auto& [v, c] : t.coeffs) r.coeffs.emplace(v, k * c);
  return r;
}

bool operator==(const LinTerm& a, const LinTerm& b) {
  return a.constant == b.constant && a.coeffs == b.coeffs;
}

LinTerm subst_term(const LinTerm& t, const std::map<std::string, LinTerm>& sub) {
  LinTerm r(t.constant);
  for (const auto& [v, c] : t.coeffs) {
    auto it = sub.find(v);
    if (it == sub.end()) {
      r.add_coeff(v, c);
    } else {
      r = r + c * it->second;
    }
  }
  return r;
}

Rational eval_term(const LinTerm& t, const std::map<std::string, Rational>& env) {
  Rational r = t.constant;
  for (const auto& [v, c] : t.coeffs) r = r + c * env.at(v);
  return r;
}

std::string term_to_string(const LinTerm& t) {
  std::string out;
  auto append = [&](const Rational& c, const std::string& var) {
    Rational mag = c.num < 0 ? -c : c;
    if (out.empty()) {
      if (c.num < 0) out += "-";
    } else {
      out += c.num < 0 ? " - " : " + ";
    }
    if (var.empty()) {
      out += mag.str();
    } else if (mag == Rational(1)) {
      out += var;
    } else {
      out += mag.str() + "*" + var;
    }
  };
  for (const auto& [v, c] : t.coeffs) append(c, v);
  if (!t.constant.is_zero() || t.coeffs.empty()) append(t.constant, "");
  return out;
}

CAtom normalize_atom(const CAtom& a) {
  CAtom r = a;
  if (r.term.coeffs.empty()) return r;
  std::int64_t den_lcm = r.term.constant.den;
  for (const auto& [v, c] : r.term.coeffs) den_lcm = std::lcm(den_lcm, c.den);
  std::int64_t num_gcd = r.term.constant.num < 0 ? -r.term.constant.num : r.term.constant.num;
  num_gcd = num_gcd * (den_lcm / r.term.constant.den);
  for (const auto& [v, c] : r.term.coeffs) {
    std::int64_t n = (c.num < 0 ? -c.num : c.num) * (den_lcm / c.den);
    num_gcd = std::gcd(num_gcd, n);
  }
  if (num_gcd == 0) num_gcd = 1;
  Rational scale(den_lcm, num_gcd);
  r.term = scale * r.term;
  if (r.op == CmpOp::Eq && r.term.coeffs.begin()->second.num < 0) r.term = -r.term;
  return r;
}

bool catom_equal(const CAtom& a, const CAtom& b) {
  if (a.op != b.op) return false;
  CAtom na = normalize_atom(a), nb = normalize_atom(b);
  return na.term == nb.term;
}

namespace {

CFormulaPtr mk_cf(CKind k, CAtom at, CFormulaPtr a, CFormulaPtr b) {
  auto f = std::make_shared<CFormula>();
  f->kind = k;
  f->atom = std::move(at);
  f->a = std::move(a);
  f->b = std::move(b);
  return f;
}

}  // namespace

CFormulaPtr cf_true() {
  static CFormulaPtr t = mk_cf(CKind::True, {}, nullptr, nullptr);
  return t;
}
CFormulaPtr cf_false() {
  static CFormulaPtr f = mk_cf(CKind::False, {}, nullptr, nullptr);
  return f;
}
CFormulaPtr cf_bool(bool v) { return v ? cf_true() : cf_false(); }
CFormulaPtr cf_atom(CAtom at) { return mk_cf(CKind::Atom, std::move(at), nullptr, nullptr); }
CFormulaPtr cf_atom(LinTerm t, CmpOp op) { return cf_atom(CAtom{std::move(t), op}); }
CFormulaPtr cf_not(CFormulaPtr a) { return mk_cf(CKind::Not, {}, std::move(a), nullptr); }
CFormulaPtr cf_and(CFormulaPtr a, CFormulaPtr b) {
  return mk_cf(CKind::And, {}, std::move(a), std::move(b));
}
CFormulaPtr cf_or(CFormulaPtr a, CFormulaPtr b) {
  return mk_cf(CKind::Or, {}, std::move(a), std::move(b));
}
CFormulaPtr cf_iff(CFormulaPtr a, CFormulaPtr b) {
  return cf_or(cf_and(a, b), cf_and(cf_not(a), cf_not(b)));
}

CFormulaPtr cf_and_all(const std::vector<CFormulaPtr>& fs) {
  if (fs.empty()) return cf_true();
  CFormulaPtr r = fs.back();
  for (size_t i = fs.size() - 1; i-- > 0;) r = cf_and(fs[i], r);
  return r;
}

CFormulaPtr cf_or_all(const std::vector<CFormulaPtr>& fs) {
  if (fs.empty()) return cf_false();
  CFormulaPtr r = fs.back();
  for (size_t i = fs.size() - 1; i-- > 0;) r = cf_or(fs[i], r);
  return r;
}

bool cformula_equal(const CFormulaPtr& a, const CFormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case CKind::True:
    case CKind::False: return true;
    case CKind::Atom: return catom_equal(a->atom, b->atom);
    case CKind::Not: return cformula_equal(a->a, b->a);
    case CKind::And:
    case CKind::Or:
      return cformula_equal(a->a, b->a) && cformula_equal(a->b, b->b);
  }
  return false;
}

void collect_cvars(const CFormulaPtr& f, std::vector<std::string>& out) {
  std::set<std::string> seen(out.begin(), out.end());
  std::function<void(const CFormulaPtr&)> walk = [&](const CFormulaPtr& g) {
    if (!g) return;
    if (g->kind == CKind::Atom)
      for (const auto& [v, c] : g->atom.term.coeffs) seen.insert(v);
    walk(g->a);
    walk(g->b);
  };
  walk(f);
  out.assign(seen.begin(), seen.end());
}

CFormulaPtr subst_formula(const CFormulaPtr& f, const std::map<std::string, LinTerm>& sub) {
  if (!f) return f;
  switch (f->kind) {
    case CKind::True:
    case CKind::False: return f;
    case CKind::Atom: return cf_atom(subst_term(f->atom.term, sub), f->atom.op);
    case CKind::Not: return cf_not(subst_formula(f->a, sub));
    case CKind::And: return cf_and(subst_formula(f->a, sub), subst_formula(f->b, sub));
    case CKind::Or: return cf_or(subst_formula(f->a, sub), subst_formula(f->b, sub));
  }
  return f;
}

bool eval_cformula(const CFormulaPtr& f, const std::map<std::string, Rational>& env) {
  switch (f->kind) {
    case CKind::True: return true;
    case CKind::False: return false;
    case CKind::Atom: {
      Rational v = eval_term(f->atom.term, env);
      switch (f->atom.op) {
        case CmpOp::Le: return v <= Rational(0);
        case CmpOp::Lt: return v < Rational(0);
        case CmpOp::Eq: return v == Rational(0);
      }
      return false;
    }
    case CKind::Not: return !eval_cformula(f->a, env);
    case CKind::And: return eval_cformula(f->a, env) && eval_cformula(f->b, env);
    case CKind::Or: return eval_cformula(f->a, env) || eval_cformula(f->b, env);
  }
  return false;
}

namespace {

// Display form of an atom: variables on the left, constant on the right,
// leading coefficient positive (flipping the comparison when needed).
std::string atom_to_string(const CAtom& a, bool negated) {
  CAtom n = normalize_atom(a);
  if (n.term.coeffs.empty()) {
    const char* op = n.op == CmpOp::Le ? "<=" : n.op == CmpOp::Lt ? "<" : negated ? "!=" : "==";
    std::string s = n.term.constant.str() + " " + op + " 0";
    if (negated && n.op != CmpOp::Eq) s = "!(" + s + ")";
    return s;
  }
  bool flip = n.term.coeffs.begin()->second.num < 0;
  LinTerm t = flip ? -n.term : n.term;
  Rational rhs = -t.constant;
  t.constant = Rational(0);
  const char* op;
  switch (n.op) {
    case CmpOp::Le: op = flip ? ">=" : "<="; break;
    case CmpOp::Lt: op = flip ? ">" : "<"; break;
    default: op = negated ? "!=" : "=="; break;
  }
  return term_to_string(t) + " " + op + " " + rhs.str();
}

int cf_prec(const CFormulaPtr& f) {
  switch (f->kind) {
    case CKind::Or: return 1;
    case CKind::And: return 2;
    default: return 3;
  }
}

void print_cf(const CFormulaPtr& f, int ctx, std::string& out) {
  int prec = cf_prec(f);
  bool parens = prec < ctx;
  if (parens) out += "(";
  switch (f->kind) {
    case CKind::True: out += "true"; break;
    case CKind::False: out += "false"; break;
    case CKind::Atom: out += atom_to_string(f->atom, false); break;
    case CKind::Not:
      if (f->a->kind == CKind::Atom && f->a->atom.op == CmpOp::Eq) {
        out += atom_to_string(f->a->atom, true);
      } else if (f->a->kind == CKind::Atom) {
        out += "!(" + atom_to_string(f->a->atom, false) + ")";
      } else {
        out += "!";
        print_cf(f->a, 3, out);
      }
      break;
    case CKind::And:
      print_cf(f->a, 2, out);
      out += " & ";
      print_cf(f->b, 2, out);
      break;
    case CKind::Or:
      print_cf(f->a, 1, out);
      out += " | ";
      print_cf(f->b, 1, out);
      break;
  }
  if (parens) out += ")";
}

}  // namespace

std::string cformula_to_string(const CFormulaPtr& f) {
  std::string out;
  print_cf(f, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct CToken {
  enum Kind { Id, Num, Sym, End } kind = End;
  std::string text;
  size_t pos = 0;
};

bool clex(const std::string& s, std::vector<CToken>& out, std::string* err) {
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    CToken t;
    t.pos = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
        ++j;
      t.kind = CToken::Id;
      t.text = s.substr(i, j - i);
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      t.kind = CToken::Num;
      t.text = s.substr(i, j - i);
      i = j;
    } else {
      t.kind = CToken::Sym;
      std::string two = s.substr(i, 2);
      if (two == "<=" || two == ">=" || two == "==" || two == "!=" || two == "=>") {
        t.text = two;
        i += 2;
      } else if (std::string("<>!&|()+-*/").find(c) != std::string::npos) {
        t.text = std::string(1, c);
        ++i;
      } else if (c == '=') {
        t.text = "==";  // lone '=' accepted as equality
        ++i;
      } else {
        if (err) *err = "unexpected character '" + std::string(1, c) + "' at offset " + std::to_string(i);
        return false;
      }
    }
    out.push_back(std::move(t));
  }
  out.push_back(CToken{});
  return true;
}

struct CParser {
  std::vector<CToken> toks;
  size_t i = 0;
  std::string err;

  const CToken& peek() const { return toks[i]; }
  bool at_sym(const std::string& s) const {
    return toks[i].kind == CToken::Sym && toks[i].text == s;
  }
  bool eat_sym(const std::string& s) {
    if (!at_sym(s)) return false;
    ++i;
    return true;
  }
  void fail(const std::string& m) {
    if (err.empty()) err = m + " at offset " + std::to_string(toks[i].pos);
  }

  bool parse_rational(Rational& out) {
    if (peek().kind != CToken::Num) {
      fail("expected number");
      return false;
    }
    std::int64_t num = 0;
    try {
      num = std::stoll(toks[i].text);
    } catch (const std::exception&) {
      fail("number out of range");
      return false;
    }
    ++i;
    std::int64_t den = 1;
    if (at_sym("/")) {
      ++i;
      if (peek().kind != CToken::Num) {
        fail("expected denominator");
        return false;
      }
      try {
        den = std::stoll(toks[i].text);
      } catch (const std::exception&) {
        fail("number out of range");
        return false;
      }
      if (den == 0) {
        fail("zero denominator");
        return false;
      }
      ++i;
    }
    out = Rational(num, den);
    return true;
  }

  // prod := num ['*' var] | var ['*' num]
  bool parse_prod(LinTerm& out) {
    out = LinTerm();
    if (peek().kind == CToken::Num) {
      Rational c;
      if (!parse_rational(c)) return false;
      if (eat_sym("*")) {
        if (peek().kind != CToken::Id) {
          fail("expected variable after '*'");
          return false;
        }
        out.add_coeff(toks[i++].text, c);
      } else {
        out.constant = c;
      }
      return true;
    }
    if (peek().kind == CToken::Id) {
      std::string name = toks[i++].text;
      Rational c(1);
      if (eat_sym("*")) {
        if (!parse_rational(c)) return false;
      }
      out.add_coeff(name, c);
      return true;
    }
    fail("expected term");
    return false;
  }

  bool parse_term(LinTerm& out) {
    bool neg = eat_sym("-");
    if (!parse_prod(out)) return false;
    if (neg) out = -out;
    while (at_sym("+") || at_sym("-")) {
      bool minus = toks[i].text == "-";
      ++i;
      LinTerm rhs;
      if (!parse_prod(rhs)) return false;
      out = minus ? out - rhs : out + rhs;
    }
    return true;
  }

  CFormulaPtr parse_atom() {
    LinTerm lhs, rhs;
    if (!parse_term(lhs)) return nullptr;
    if (peek().kind != CToken::Sym) {
      fail("expected comparison");
      return nullptr;
    }
    std::string op = toks[i].text;
    if (op != "<" && op != "<=" && op != "==" && op != "!=" && op != ">" && op != ">=") {
      fail("expected comparison");
      return nullptr;
    }
    ++i;
    if (!parse_term(rhs)) return nullptr;
    LinTerm d = lhs - rhs;
    if (op == "<") return cf_atom(d, CmpOp::Lt);
    if (op == "<=") return cf_atom(d, CmpOp::Le);
    if (op == "==") return cf_atom(d, CmpOp::Eq);
    if (op == "!=") return cf_not(cf_atom(d, CmpOp::Eq));
    if (op == ">") return cf_atom(rhs - lhs, CmpOp::Lt);
    return cf_atom(rhs - lhs, CmpOp::Le);
  }

  CFormulaPtr parse_neg() {
    if (eat_sym("!")) {
      CFormulaPtr a = parse_neg();
      return a ? cf_not(a) : nullptr;
    }
    if (peek().kind == CToken::Id && toks[i].text == "true" &&
        !(toks[i + 1].kind == CToken::Sym &&
          (toks[i + 1].text == "*" || toks[i + 1].text == "+" || toks[i + 1].text == "-"))) {
      ++i;
      return cf_true();
    }
    if (peek().kind == CToken::Id && toks[i].text == "false" &&
        !(toks[i + 1].kind == CToken::Sym &&
          (toks[i + 1].text == "*" || toks[i + 1].text == "+" || toks[i + 1].text == "-"))) {
      ++i;
      return cf_false();
    }
    if (eat_sym("(")) {
      CFormulaPtr f = parse_formula();
      if (!f) return nullptr;
      if (!eat_sym(")")) {
        fail("expected ')'");
        return nullptr;
      }
      return f;
    }
    return parse_atom();
  }

  CFormulaPtr parse_conj() {
    CFormulaPtr f = parse_neg();
    while (f && eat_sym("&")) {
      CFormulaPtr r = parse_neg();
      if (!r) return nullptr;
      f = cf_and(f, r);
    }
    return f;
  }

  CFormulaPtr parse_disj() {
    CFormulaPtr f = parse_conj();
    while (f && eat_sym("|")) {
      CFormulaPtr r = parse_conj();
      if (!r) return nullptr;
      f = cf_or(f, r);
    }
    return f;
  }

  CFormulaPtr parse_formula() {
    CFormulaPtr f = parse_disj();
    if (f && eat_sym("=>")) {
      CFormulaPtr r = parse_formula();
      if (!r) return nullptr;
      f = cf_or(cf_not(f), r);
    }
    return f;
  }
};

}  // namespace

CFormulaPtr parse_cformula_text(const std::string& text, std::string* err) {
  CParser p;
  if (!clex(text, p.toks, err)) return nullptr;
  CFormulaPtr f = p.parse_formula();
  if (f && p.peek().kind != CToken::End) {
    p.fail("trailing input");
    f = nullptr;
  }
  if (!f && err) *err = p.err.empty() ? "parse error" : p.err;
  return f;
}

// ---------------------------------------------------------------------------
// Simplification

namespace {

// Negation of an atom as a single atom, when one exists.
std::optional<CAtom> negate_atom(const CAtom& a) {
  switch (a.op) {
    case CmpOp::Le: return CAtom{-a.term, CmpOp::Lt};
    case CmpOp::Lt: return CAtom{-a.term, CmpOp::Le};
    case CmpOp::Eq: return std::nullopt;
  }
  return std::nullopt;
}

bool is_complement(const CFormulaPtr& a, const CFormulaPtr& b) {
  if (a->kind == CKind::Not && cformula_equal(a->a, b)) return true;
  if (b->kind == CKind::Not && cformula_equal(b->a, a)) return true;
  if (a->kind == CKind::Atom && b->kind == CKind::Atom) {
    auto neg = negate_atom(a->atom);
    if (neg && catom_equal(*neg, b->atom)) return true;
  }
  return false;
}

void flatten(const CFormulaPtr& f, CKind k, std::vector<CFormulaPtr>& out) {
  if (f->kind == k) {
    flatten(f->a, k, out);
    flatten(f->b, k, out);
  } else {
    out.push_back(f);
  }
}

// Conjunct set of f (or f itself), used for absorption checks.
void members(const CFormulaPtr& f, CKind k, std::vector<CFormulaPtr>& out) {
  if (f->kind == k) {
    members(f->a, k, out);
    members(f->b, k, out);
  } else {
    out.push_back(f);
  }
}

bool subset_of(const std::vector<CFormulaPtr>& a, const std::vector<CFormulaPtr>& b) {
  for (const auto& x : a) {
    bool found = false;
    for (const auto& y : b)
      if (cformula_equal(x, y)) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

CFormulaPtr simp_node(const CFormulaPtr& f);

CFormulaPtr simp_flat(const CFormulaPtr& f, CKind kind) {
  CKind dual = kind == CKind::And ? CKind::Or : CKind::And;
  CFormulaPtr unit = kind == CKind::And ? cf_true() : cf_false();
  CFormulaPtr zero = kind == CKind::And ? cf_false() : cf_true();

  std::vector<CFormulaPtr> raw;
  flatten(f, kind, raw);
  std::vector<CFormulaPtr> kids;
  for (const auto& c : raw) {
    CFormulaPtr s = simp_node(c);
    if (s->kind == zero->kind) return zero;
    if (s->kind == unit->kind) continue;
    std::vector<CFormulaPtr> nested;
    flatten(s, kind, nested);
    for (const auto& n : nested) {
      bool dup = false;
      for (const auto& have : kids)
        if (cformula_equal(have, n)) {
          dup = true;
          break;
        }
      if (!dup) kids.push_back(n);
    }
  }
  for (size_t x = 0; x < kids.size(); ++x)
    for (size_t y = x + 1; y < kids.size(); ++y)
      if (is_complement(kids[x], kids[y])) return zero;
  // absorption: a & (a | b) -> a, a | (a & b) -> a (set inclusion on members)
  std::vector<std::vector<CFormulaPtr>> sets(kids.size());
  for (size_t x = 0; x < kids.size(); ++x) members(kids[x], dual, sets[x]);
  std::vector<CFormulaPtr> kept;
  for (size_t x = 0; x < kids.size(); ++x) {
    bool absorbed = false;
    for (size_t y = 0; y < kids.size() && !absorbed; ++y) {
      if (x == y) continue;
      if (subset_of(sets[y], sets[x]) && !(subset_of(sets[x], sets[y]) && y > x)) absorbed = true;
    }
    if (!absorbed) kept.push_back(kids[x]);
  }
  if (kept.empty()) return unit;
  return kind == CKind::And ? cf_and_all(kept) : cf_or_all(kept);
}

CFormulaPtr simp_node(const CFormulaPtr& f) {
  switch (f->kind) {
    case CKind::True:
    case CKind::False: return f;
    case CKind::Atom: {
      if (f->atom.term.coeffs.empty()) {
        Rational c = f->atom.term.constant;
        switch (f->atom.op) {
          case CmpOp::Le: return cf_bool(c <= Rational(0));
          case CmpOp::Lt: return cf_bool(c < Rational(0));
          case CmpOp::Eq: return cf_bool(c.is_zero());
        }
      }
      return cf_atom(normalize_atom(f->atom));
    }
    case CKind::Not: {
      CFormulaPtr a = simp_node(f->a);
      if (a->kind == CKind::True) return cf_false();
      if (a->kind == CKind::False) return cf_true();
      if (a->kind == CKind::Not) return a->a;
      if (a->kind == CKind::Atom) {
        auto neg = negate_atom(a->atom);
        if (neg) return cf_atom(normalize_atom(*neg));
      }
      return cf_not(a);
    }
    case CKind::And:
    case CKind::Or: return simp_flat(f, f->kind);
  }
  return f;
}

// --- single-variable interval analysis ---

struct IBound {
  bool inf = false;      // lo: -infinity, hi: +infinity
  Rational v;
  bool closed = true;
};

struct Interval {
  IBound lo, hi;
};

using ISet = std::vector<Interval>;  // disjoint, ascending

bool bound_lt(const IBound& a, const IBound& b, bool lo_side) {
  // compare as lower bounds when lo_side, as positions otherwise
  if (a.inf != b.inf) return lo_side ? a.inf : b.inf;
  if (a.inf) return false;
  if (a.v != b.v) return a.v < b.v;
  if (lo_side) return a.closed && !b.closed;  // closed lower bound starts earlier
  return !a.closed && b.closed;               // open upper bound ends earlier
}

// Integers k with "after hi" < k < "before lo" — i.e. in the gap between an
// interval ending at h and one starting at l.
bool gap_empty(const IBound& h, const IBound& l, Sort sort) {
  if (h.inf || l.inf) return true;  // overlapping half-lines have no gap
  bool left_strict = h.closed;      // gap starts strictly after h.v iff h.v is covered
  bool right_strict = l.closed;
  if (sort == Sort::Int) {
    Rational left = h.v, right = l.v;
    std::int64_t kmin = left_strict ? left.floor() + 1
                                    : (left.is_integer() ? left.num : left.ceil());
    std::int64_t kmax = right_strict ? right.ceil() - 1
                                     : (right.is_integer() ? right.num : right.floor());
    return kmin > kmax;
  }
  if (h.v < l.v) return false;
  if (h.v > l.v) return true;
  return left_strict || right_strict;  // both open leaves the single point out
}

bool interval_nonempty(const Interval& iv, Sort sort) {
  if (iv.lo.inf || iv.hi.inf) return true;
  if (sort == Sort::Int) {
    std::int64_t kmin = iv.lo.closed ? iv.lo.v.ceil()
                                     : (iv.lo.v.is_integer() ? iv.lo.v.num + 1 : iv.lo.v.ceil());
    std::int64_t kmax = iv.hi.closed ? iv.hi.v.floor()
                                     : (iv.hi.v.is_integer() ? iv.hi.v.num - 1 : iv.hi.v.floor());
    return kmin <= kmax;
  }
  if (iv.lo.v < iv.hi.v) return true;
  return iv.lo.v == iv.hi.v && iv.lo.closed && iv.hi.closed;
}

ISet iset_union(const ISet& a, const ISet& b, Sort sort) {
  ISet all = a;
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end(),
            [](const Interval& x, const Interval& y) { return bound_lt(x.lo, y.lo, true); });
  ISet out;
  for (const auto& iv : all) {
    if (!out.empty() && gap_empty(out.back().hi, iv.lo, sort)) {
      if (bound_lt(out.back().hi, iv.hi, false)) out.back().hi = iv.hi;
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

ISet iset_complement(const ISet& a, Sort sort) {
  ISet out;
  IBound cursor;  // lower bound of the next gap
  cursor.inf = true;
  for (const auto& iv : a) {
    if (!iv.lo.inf) {
      Interval gap;
      gap.lo = cursor;
      gap.hi.inf = false;
      gap.hi.v = iv.lo.v;
      gap.hi.closed = !iv.lo.closed;
      if (gap.lo.inf || interval_nonempty(gap, sort)) out.push_back(gap);
    }
    if (iv.hi.inf) return out;  // covered to +infinity
    cursor.inf = false;
    cursor.v = iv.hi.v;
    cursor.closed = !iv.hi.closed;
  }
  Interval tail;
  tail.lo = cursor;
  tail.hi.inf = true;
  out.push_back(tail);
  return out;
}

ISet iset_intersect(const ISet& a, const ISet& b, Sort sort) {
  return iset_complement(
      iset_union(iset_complement(a, sort), iset_complement(b, sort), sort), sort);
}

ISet iset_full() {
  Interval iv;
  iv.lo.inf = true;
  iv.hi.inf = true;
  return {iv};
}

ISet formula_iset(const CFormulaPtr& f, const std::string& var, Sort sort) {
  switch (f->kind) {
    case CKind::True: return iset_full();
    case CKind::False: return {};
    case CKind::Atom: {
      Rational c = f->atom.term.coeffs.at(var);
      Rational bound = (-f->atom.term.constant) / c;
      Interval iv;
      bool upper = c > Rational(0);  // c*x + d op 0 with c>0 bounds x above
      switch (f->atom.op) {
        case CmpOp::Eq:
          iv.lo.v = bound;
          iv.hi.v = bound;
          return {iv};
        case CmpOp::Le:
        case CmpOp::Lt: {
          bool closed = f->atom.op == CmpOp::Le;
          if (upper) {
            iv.lo.inf = true;
            iv.hi.v = bound;
            iv.hi.closed = closed;
          } else {
            iv.hi.inf = true;
            iv.lo.v = bound;
            iv.lo.closed = closed;
          }
          return {iv};
        }
      }
      return {};
    }
    case CKind::Not: return iset_complement(formula_iset(f->a, var, sort), sort);
    case CKind::And:
      return iset_intersect(formula_iset(f->a, var, sort), formula_iset(f->b, var, sort), sort);
    case CKind::Or:
      return iset_union(formula_iset(f->a, var, sort), formula_iset(f->b, var, sort), sort);
  }
  return {};
}

CFormulaPtr interval_formula(const Interval& iv, const std::string& var) {
  LinTerm x = LinTerm::variable(var);
  if (iv.lo.inf && iv.hi.inf) return cf_true();
  if (iv.lo.inf) {
    LinTerm t = x - LinTerm(iv.hi.v);
    return cf_atom(t, iv.hi.closed ? CmpOp::Le : CmpOp::Lt);
  }
  if (iv.hi.inf) {
    LinTerm t = LinTerm(iv.lo.v) - x;
    return cf_atom(t, iv.lo.closed ? CmpOp::Le : CmpOp::Lt);
  }
  if (iv.lo.v == iv.hi.v) return cf_atom(x - LinTerm(iv.lo.v), CmpOp::Eq);
  CFormulaPtr lo = cf_atom(LinTerm(iv.lo.v) - x, iv.lo.closed ? CmpOp::Le : CmpOp::Lt);
  CFormulaPtr hi = cf_atom(x - LinTerm(iv.hi.v), iv.hi.closed ? CmpOp::Le : CmpOp::Lt);
  return cf_and(lo, hi);
}

CFormulaPtr iset_formula(const ISet& s, const std::string& var, Sort sort) {
  ISet pruned;
  for (const auto& iv : s)
    if (interval_nonempty(iv, sort)) pruned.push_back(iv);
  if (pruned.empty()) return cf_false();
  if (pruned.size() == 1 && pruned[0].lo.inf && pruned[0].hi.inf) return cf_true();
  // punctured line renders as var != v
  if (pruned.size() == 2 && pruned[0].lo.inf && pruned[1].hi.inf && !pruned[0].hi.inf &&
      !pruned[1].lo.inf && !pruned[0].hi.closed && !pruned[1].lo.closed &&
      pruned[0].hi.v == pruned[1].lo.v) {
    return cf_not(cf_atom(LinTerm::variable(var) - LinTerm(pruned[0].hi.v), CmpOp::Eq));
  }
  std::vector<CFormulaPtr> parts;
  for (const auto& iv : pruned) parts.push_back(interval_formula(iv, var));
  return cf_or_all(parts);
}

}  // namespace

CFormulaPtr simplify_cformula(const CFormulaPtr& f, const std::map<std::string, Sort>& sorts) {
  CFormulaPtr s = simp_node(f);
  std::vector<std::string> vars;
  collect_cvars(s, vars);
  if (vars.size() != 1) return s;
  const std::string& var = vars[0];
  Sort sort = Sort::Real;
  auto it = sorts.find(var);
  if (it != sorts.end()) sort = it->second;
  ISet set = formula_iset(s, var, sort);
  // re-merge under the sort in case construction left adjacent pieces
  ISet merged;
  for (const auto& iv : set)
    if (interval_nonempty(iv, sort)) merged = iset_union(merged, {iv}, sort);
  return iset_formula(merged, var, sort);
}

}  // namespace bp
