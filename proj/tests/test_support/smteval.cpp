#include "smteval.h"

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace smteval {
namespace {

struct Node {
  bool atom = false;
  std::string s;
  std::vector<Node> kids;
};

struct Reader {
  const std::string& text;
  size_t pos = 0;

  explicit Reader(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == ';') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool next(Node& out) {
    skip_ws();
    if (pos >= text.size()) return false;
    char c = text[pos];
    if (c == '(') {
      ++pos;
      out = Node{};
      Node kid;
      while (true) {
        skip_ws();
        if (pos < text.size() && text[pos] == ')') {
          ++pos;
          return true;
        }
        if (!next(kid)) throw std::runtime_error("unterminated list");
        out.kids.push_back(std::move(kid));
      }
    }
    if (c == ')') throw std::runtime_error("stray ')'");
    out = Node{};
    out.atom = true;
    if (c == '|') {
      ++pos;
      while (pos < text.size() && text[pos] != '|') out.s += text[pos++];
      if (pos >= text.size()) throw std::runtime_error("unterminated |symbol|");
      ++pos;
      return true;
    }
    while (pos < text.size()) {
      char d = text[pos];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') break;
      out.s += d;
      ++pos;
    }
    if (out.s.empty()) throw std::runtime_error("empty token");
    return true;
  }
};

struct Value {
  bool is_int = false;
  bool b = false;
  int64_t i = 0;
};

Value vb(bool x) { return Value{false, x, 0}; }
Value vi(int64_t x) { return Value{true, false, x}; }

bool same(const Value& a, const Value& b) {
  if (a.is_int != b.is_int) throw std::runtime_error("sort mismatch in =");
  return a.is_int ? a.i == b.i : a.b == b.b;
}

bool is_int_literal(const std::string& s) {
  size_t k = s.size() > 1 && s[0] == '-' ? 1 : 0;
  if (k >= s.size()) return false;
  for (; k < s.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) return false;
  return true;
}

struct Macro {
  std::vector<std::string> params;
  Node body;
};

struct Eval {
  const Model& model;
  std::map<std::string, Macro> macros;

  explicit Eval(const Model& m) : model(m) {}

  Value run(const Node& e, std::unordered_map<std::string, bool>& env, int depth) {
    if (depth > 128) throw std::runtime_error("expression too deep");
    if (e.atom) {
      if (e.s == "true") return vb(true);
      if (e.s == "false") return vb(false);
      if (is_int_literal(e.s)) return vi(std::stoll(e.s));
      auto it = env.find(e.s);
      if (it != env.end()) return vb(it->second);
      auto bit = model.bools.find(e.s);
      if (bit != model.bools.end()) return vb(bit->second);
      auto mit = macros.find(e.s);
      if (mit != macros.end() && mit->second.params.empty()) {
        std::unordered_map<std::string, bool> empty;
        return run(mit->second.body, empty, depth + 1);
      }
      throw std::runtime_error("unbound symbol '" + e.s + "'");
    }
    if (e.kids.empty() || !e.kids[0].atom) throw std::runtime_error("bad application");
    const std::string& op = e.kids[0].s;
    auto arg = [&](size_t k) { return run(e.kids[k], env, depth + 1); };
    auto barg = [&](size_t k) {
      Value v = arg(k);
      if (v.is_int) throw std::runtime_error("expected Bool argument to " + op);
      return v.b;
    };
    if (op == "not") return vb(!barg(1));
    if (op == "and") {
      for (size_t k = 1; k < e.kids.size(); ++k)
        if (!barg(k)) return vb(false);
      return vb(true);
    }
    if (op == "or") {
      for (size_t k = 1; k < e.kids.size(); ++k)
        if (barg(k)) return vb(true);
      return vb(false);
    }
    if (op == "=>") {
      bool v = barg(e.kids.size() - 1);
      for (size_t k = e.kids.size() - 1; k-- > 1;) v = !barg(k) || v;
      return vb(v);
    }
    if (op == "=") {
      Value first = arg(1);
      for (size_t k = 2; k < e.kids.size(); ++k)
        if (!same(arg(k), first)) return vb(false);
      return vb(true);
    }
    if (op == "ite") return barg(1) ? arg(2) : arg(3);
    if (op == "+") {
      int64_t s = 0;
      for (size_t k = 1; k < e.kids.size(); ++k) {
        Value v = arg(k);
        if (!v.is_int) throw std::runtime_error("expected Int argument to +");
        s += v.i;
      }
      return vi(s);
    }
    if (op == "<=") {
      Value a = arg(1), b = arg(2);
      if (!a.is_int || !b.is_int) throw std::runtime_error("expected Int arguments to <=");
      return vb(a.i <= b.i);
    }
    if (op == "forall") {
      std::vector<std::string> names;
      for (const auto& binding : e.kids[1].kids) {
        if (binding.kids.size() != 2 || binding.kids[1].s != "Bool")
          throw std::runtime_error("forall binds a non-Bool variable");
        names.push_back(binding.kids[0].s);
      }
      if (names.size() > 24) throw std::runtime_error("forall too wide to expand");
      for (uint64_t row = 0; row < (1ull << names.size()); ++row) {
        for (size_t k = 0; k < names.size(); ++k) env[names[k]] = (row >> k) & 1u;
        Value v = run(e.kids[2], env, depth + 1);
        if (v.is_int || !v.b) {
          for (const auto& n : names) env.erase(n);
          return vb(false);
        }
      }
      for (const auto& n : names) env.erase(n);
      return vb(true);
    }
    auto fit = model.funs.find(op);
    if (fit != model.funs.end()) {
      const bp::TruthTable& t = fit->second;
      if ((1ull << (e.kids.size() - 1)) != t.size())
        throw std::runtime_error("arity mismatch applying '" + op + "'");
      uint64_t row = 0;
      for (size_t k = 1; k < e.kids.size(); ++k)
        if (barg(k)) row |= 1ull << (k - 1);
      return vb(t[row]);
    }
    auto mit = macros.find(op);
    if (mit != macros.end()) {
      const Macro& f = mit->second;
      if (f.params.size() != e.kids.size() - 1)
        throw std::runtime_error("arity mismatch applying macro '" + op + "'");
      std::unordered_map<std::string, bool> inner;
      for (size_t k = 0; k < f.params.size(); ++k) inner[f.params[k]] = barg(k + 1);
      return run(f.body, inner, depth + 1);
    }
    throw std::runtime_error("unsupported operator '" + op + "'");
  }
};

}  // namespace

Model model_from_solution(const bp::SmtJob& job, const bp::SolutionModel& sol) {
  Model m;
  for (const auto& sel : job.sels) {
    auto it = sol.schema.find(sel.node);
    bp::UpdateSchema got = it != sol.schema.end() ? it->second : bp::UpdateSchema::Id;
    m.bools[sel.symbol] = got == sel.schema;
  }
  for (const auto& fun : job.funs) {
    bp::TruthTable t(1ull << fun.arity, false);
    const bp::TruthTable* src = nullptr;
    switch (fun.kind) {
      case 'g': {
        auto it = sol.guard.find(fun.node);
        if (it != sol.guard.end()) src = &it->second;
        break;
      }
      case 'a': {
        auto it = sol.assign.find(fun.node);
        if (it != sol.assign.end() && static_cast<size_t>(fun.index) < it->second.size())
          src = &it->second[static_cast<size_t>(fun.index)];
        break;
      }
      case 'c': {
        auto it = sol.callargs.find(fun.node);
        if (it != sol.callargs.end() && static_cast<size_t>(fun.index) < it->second.size())
          src = &it->second[static_cast<size_t>(fun.index)];
        break;
      }
      case 'i': {
        auto it = sol.proof.at.find(fun.node);
        if (it != sol.proof.at.end()) src = &it->second;
        break;
      }
    }
    if (src && src->size() == t.size()) t = *src;
    m.funs[fun.symbol] = std::move(t);
  }
  return m;
}

std::string render_model_response(const bp::SmtJob& job, const bp::SolutionModel& sol) {
  Model m = model_from_solution(job, sol);
  std::string out = "sat\n(\n";
  for (const auto& sel : job.sels)
    out += "  (define-fun " + sel.symbol + " () Bool " +
           (m.bools.at(sel.symbol) ? "true" : "false") + ")\n";
  for (const auto& fun : job.funs) {
    const bp::TruthTable& t = m.funs.at(fun.symbol);
    out += "  (define-fun " + fun.symbol + " (";
    for (int k = 0; k < fun.arity; ++k) {
      if (k) out += " ";
      out += "(x!" + std::to_string(k) + " Bool)";
    }
    out += ") Bool\n    ";
    // disjunction of true rows, the way a tabled model unfolds
    std::vector<std::string> rows;
    for (size_t row = 0; row < t.size(); ++row) {
      if (!t[row]) continue;
      std::string conj;
      for (int k = 0; k < fun.arity; ++k) {
        if (k) conj += " ";
        bool bit = (row >> k) & 1u;
        std::string x = "x!" + std::to_string(k);
        conj += bit ? x : "(not " + x + ")";
      }
      rows.push_back(fun.arity <= 1 ? conj : "(and " + conj + ")");
    }
    if (rows.empty()) {
      out += "false";
    } else if (rows.size() == t.size()) {
      out += "true";
    } else if (rows.size() == 1) {
      out += rows[0];
    } else {
      out += "(or";
      for (const auto& r : rows) out += " " + r;
      out += ")";
    }
    out += ")\n";
  }
  out += ")\n";
  return out;
}

bool eval_script(const std::string& script, const Model& model, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  try {
    Reader rd(script);
    Eval ev(model);
    Node form;
    int asserts = 0;
    while (rd.next(form)) {
      if (form.atom || form.kids.empty() || !form.kids[0].atom) continue;
      const std::string& head = form.kids[0].s;
      if (head == "set-option" || head == "set-logic" || head == "check-sat" ||
          head == "get-model" || head == "echo")
        continue;
      if (head == "declare-fun") {
        const std::string& name = form.kids[1].s;
        bool nullary = form.kids[2].kids.empty();
        if (nullary ? !model.bools.count(name) : !model.funs.count(name))
          return fail("model does not define declared symbol '" + name + "'");
        continue;
      }
      if (head == "define-fun") {
        Macro f;
        for (const auto& p : form.kids[2].kids) f.params.push_back(p.kids[0].s);
        f.body = form.kids[4];
        ev.macros[form.kids[1].s] = std::move(f);
        continue;
      }
      if (head == "assert") {
        ++asserts;
        std::unordered_map<std::string, bool> env;
        Value v = ev.run(form.kids[1], env, 0);
        if (v.is_int) return fail("assert of an Int expression");
        if (!v.b) return fail("assert #" + std::to_string(asserts) + " is false");
        continue;
      }
      return fail("unsupported top-level form '" + head + "'");
    }
    if (asserts == 0) return fail("script contains no asserts");
  } catch (const std::exception& ex) {
    return fail(ex.what());
  }
  return true;
}

}  // namespace smteval
