#include "bprepair/lira.h"

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

namespace bp {

namespace {

constexpr size_t kCubeCap = 4096;
constexpr size_t kAtomCap = 20000;

using Cube = std::vector<CAtom>;

// Not is compiled away: !(t<=0) -> -t<0, !(t<0) -> -t<=0, !(t==0) splits.
CFormulaPtr nnf(const CFormulaPtr& f, bool neg) {
  switch (f->kind) {
    case CKind::True: return cf_bool(!neg);
    case CKind::False: return cf_bool(neg);
    case CKind::Atom:
      if (!neg) return f;
      switch (f->atom.op) {
        case CmpOp::Le: return cf_atom(-f->atom.term, CmpOp::Lt);
        case CmpOp::Lt: return cf_atom(-f->atom.term, CmpOp::Le);
        case CmpOp::Eq:
          return cf_or(cf_atom(f->atom.term, CmpOp::Lt), cf_atom(-f->atom.term, CmpOp::Lt));
      }
      return f;
    case CKind::Not: return nnf(f->a, !neg);
    case CKind::And: {
      CFormulaPtr a = nnf(f->a, neg), b = nnf(f->b, neg);
      return neg ? cf_or(a, b) : cf_and(a, b);
    }
    case CKind::Or: {
      CFormulaPtr a = nnf(f->a, neg), b = nnf(f->b, neg);
      return neg ? cf_and(a, b) : cf_or(a, b);
    }
  }
  return f;
}

// f must be in NNF. Returns false when the cube count would exceed the cap.
bool dnf(const CFormulaPtr& f, std::vector<Cube>& out) {
  switch (f->kind) {
    case CKind::True: out.push_back({}); return true;
    case CKind::False: return true;
    case CKind::Atom: out.push_back({f->atom}); return true;
    case CKind::Or: {
      if (!dnf(f->a, out)) return false;
      return dnf(f->b, out) && out.size() <= kCubeCap;
    }
    case CKind::And: {
      std::vector<Cube> left, right;
      if (!dnf(f->a, left) || !dnf(f->b, right)) return false;
      if (left.size() * right.size() > kCubeCap) return false;
      for (const auto& l : left)
        for (const auto& r : right) {
          Cube c = l;
          c.insert(c.end(), r.begin(), r.end());
          out.push_back(std::move(c));
        }
      return true;
    }
    case CKind::Not: return false;  // unreachable in NNF
  }
  return false;
}

bool all_int_vars(const CAtom& a, const std::map<std::string, Sort>& sorts) {
  for (const auto& [v, c] : a.term.coeffs) {
    auto it = sorts.find(v);
    if (it == sorts.end() || it->second != Sort::Int) return false;
  }
  return true;
}

// Normalize, fold constants, apply integer strengthening. Returns No when a
// constant or gcd-infeasible atom refutes the cube, Yes otherwise.
Tri clean_cube(Cube& cube, const std::map<std::string, Sort>& sorts) {
  Cube next;
  for (const auto& raw : cube) {
    CAtom a = normalize_atom(raw);
    if (a.term.coeffs.empty()) {
      Rational c = a.term.constant;
      bool ok = a.op == CmpOp::Le ? c <= Rational(0)
                                  : a.op == CmpOp::Lt ? c < Rational(0) : c.is_zero();
      if (!ok) return Tri::No;
      continue;
    }
    // normalized atoms have coprime integer entries
    if (all_int_vars(a, sorts)) {
      if (a.op == CmpOp::Lt) {
        a.term.constant = a.term.constant + Rational(1);
        a.op = CmpOp::Le;
      } else if (a.op == CmpOp::Eq) {
        std::int64_t g = 0;
        for (const auto& [v, c] : a.term.coeffs) g = std::gcd(g, c.num < 0 ? -c.num : c.num);
        if (g > 1 && a.term.constant.num % g != 0) return Tri::No;
      }
    }
    next.push_back(std::move(a));
  }
  cube = std::move(next);
  return Tri::Yes;
}

Tri cube_sat(Cube cube, const std::map<std::string, Sort>& sorts) {
  if (clean_cube(cube, sorts) == Tri::No) return Tri::No;

  // Gaussian elimination of equalities.
  for (;;) {
    int pick = -1;
    std::string pivot;
    int best_rank = -1;
    for (size_t i = 0; i < cube.size(); ++i) {
      if (cube[i].op != CmpOp::Eq) continue;
      for (const auto& [v, c] : cube[i].term.coeffs) {
        auto it = sorts.find(v);
        bool is_real = it == sorts.end() || it->second == Sort::Real;
        bool unit = c == Rational(1) || c == Rational(-1);
        // prefer exact pivots: real first, then unit-coefficient int
        int rank = is_real ? 3 : unit ? 2 : 1;
        if (rank > best_rank) {
          best_rank = rank;
          pick = static_cast<int>(i);
          pivot = v;
        }
      }
    }
    if (pick < 0) break;
    CAtom eq = cube[pick];
    Rational c = eq.term.coeffs.at(pivot);
    LinTerm rest = eq.term;
    rest.coeffs.erase(pivot);
    LinTerm sol = (Rational(-1) / c) * rest;  // pivot = sol
    cube.erase(cube.begin() + pick);
    std::map<std::string, LinTerm> sub{{pivot, sol}};
    for (auto& a : cube) a.term = subst_term(a.term, sub);
    if (clean_cube(cube, sorts) == Tri::No) return Tri::No;
  }

  // Fourier-Motzkin over the remaining inequalities.
  for (;;) {
    std::vector<std::string> vars;
    for (const auto& a : cube)
      for (const auto& [v, c] : a.term.coeffs)
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    if (vars.empty()) return Tri::Yes;  // constants were already folded away
    std::string best;
    size_t best_cost = SIZE_MAX;
    for (const auto& v : vars) {
      size_t lo = 0, hi = 0;
      for (const auto& a : cube) {
        auto it = a.term.coeffs.find(v);
        if (it == a.term.coeffs.end()) continue;
        (it->second < Rational(0) ? lo : hi)++;
      }
      if (lo * hi < best_cost) {
        best_cost = lo * hi;
        best = v;
      }
    }
    Cube lowers, uppers, rest;
    for (const auto& a : cube) {
      auto it = a.term.coeffs.find(best);
      if (it == a.term.coeffs.end())
        rest.push_back(a);
      else
        (it->second < Rational(0) ? lowers : uppers).push_back(a);
    }
    for (const auto& l : lowers)
      for (const auto& u : uppers) {
        Rational cl = l.term.coeffs.at(best), cu = u.term.coeffs.at(best);
        CAtom combined;
        combined.term = cu * l.term + (-cl) * u.term;  // best cancels, both scales > 0
        combined.op = l.op == CmpOp::Lt || u.op == CmpOp::Lt ? CmpOp::Lt : CmpOp::Le;
        rest.push_back(std::move(combined));
      }
    if (rest.size() > kAtomCap) return Tri::Unknown;
    cube = std::move(rest);
    if (clean_cube(cube, sorts) == Tri::No) return Tri::No;
    if (cube.empty()) return Tri::Yes;
  }
}

}  // namespace

Tri lira_sat(const CFormulaPtr& f, const std::map<std::string, Sort>& sorts) {
  std::vector<Cube> cubes;
  if (!dnf(nnf(f, false), cubes)) return Tri::Unknown;
  bool unknown = false;
  for (auto& c : cubes) {
    Tri t = cube_sat(std::move(c), sorts);
    if (t == Tri::Yes) return Tri::Yes;
    if (t == Tri::Unknown) unknown = true;
  }
  return unknown ? Tri::Unknown : Tri::No;
}

Tri lira_valid(const CFormulaPtr& f, const std::map<std::string, Sort>& sorts) {
  Tri t = lira_sat(cf_not(f), sorts);
  if (t == Tri::Yes) return Tri::No;
  if (t == Tri::No) return Tri::Yes;
  return Tri::Unknown;
}

}  // namespace bp
