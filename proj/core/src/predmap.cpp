#include "bprepair/predmap.h"

#include <json.hpp>

namespace bp {

std::optional<PredicateMap> load_predicate_map(const std::string& json_text,
                                               const std::string& filename,
                                               DiagnosticSink& sink) {
  PredicateMap pm;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    sink.error(filename, 0, 0, DiagCode::BadInput, std::string("predicate map: ") + e.what());
    return std::nullopt;
  }
  try {
    for (auto& v : j.at("variables")) {
      std::string name = v.at("name").get<std::string>();
      std::string sort = v.at("sort").get<std::string>();
      if (pm.sorts.count(name)) {
        sink.error(filename, 0, 0, DiagCode::BadInput,
                   "predicate map: duplicate variable '" + name + "'");
        return std::nullopt;
      }
      if (sort != "int" && sort != "real") {
        sink.error(filename, 0, 0, DiagCode::BadInput,
                   "predicate map: sort of '" + name + "' must be int or real");
        return std::nullopt;
      }
      pm.variables.push_back(name);
      pm.sorts[name] = sort == "int" ? Sort::Int : Sort::Real;
    }
    for (auto& [bvar, text] : j.at("predicates").items()) {
      std::string err;
      CFormulaPtr f = parse_cformula_text(text.get<std::string>(), &err);
      if (!f) {
        sink.error(filename, 0, 0, DiagCode::BadInput,
                   "predicate map: '" + bvar + "': " + err);
        return std::nullopt;
      }
      std::vector<std::string> used;
      collect_cvars(f, used);
      for (const auto& u : used)
        if (!pm.sorts.count(u)) {
          sink.error(filename, 0, 0, DiagCode::BadInput,
                     "predicate map: '" + bvar + "' uses undeclared variable '" + u + "'");
          return std::nullopt;
        }
      pm.preds[bvar] = f;
    }
  } catch (const std::exception& e) {
    sink.error(filename, 0, 0, DiagCode::BadInput, std::string("predicate map: ") + e.what());
    return std::nullopt;
  }
  return pm;
}

std::optional<std::string> predicate_map_gap(const PredicateMap& pm, const Program& prog) {
  for (const auto& g : prog.globals)
    if (!pm.has(g.name)) return g.name;
  for (const auto& p : prog.procedures)
    for (const auto& l : p.locals())
      if (!pm.has(l)) return l;
  return std::nullopt;
}

CFormulaPtr gamma_expr(const ExprPtr& e, const PredicateMap& pm, std::string* err) {
  auto fail = [&](const std::string& m) -> CFormulaPtr {
    if (err && err->empty()) *err = m;
    return nullptr;
  };
  switch (e->kind) {
    case ExprKind::True: return cf_true();
    case ExprKind::False: return cf_false();
    case ExprKind::Var: {
      auto it = pm.preds.find(e->name);
      if (it == pm.preds.end()) return fail("no predicate for variable '" + e->name + "'");
      return it->second;
    }
    case ExprKind::Not: {
      CFormulaPtr a = gamma_expr(e->a, pm, err);
      return a ? cf_not(a) : nullptr;
    }
    case ExprKind::And: {
      CFormulaPtr a = gamma_expr(e->a, pm, err), b = gamma_expr(e->b, pm, err);
      return a && b ? cf_and(a, b) : nullptr;
    }
    case ExprKind::Or: {
      CFormulaPtr a = gamma_expr(e->a, pm, err), b = gamma_expr(e->b, pm, err);
      return a && b ? cf_or(a, b) : nullptr;
    }
    case ExprKind::Implies: {
      CFormulaPtr a = gamma_expr(e->a, pm, err), b = gamma_expr(e->b, pm, err);
      return a && b ? cf_or(cf_not(a), b) : nullptr;
    }
    case ExprKind::Eq: {
      CFormulaPtr a = gamma_expr(e->a, pm, err), b = gamma_expr(e->b, pm, err);
      return a && b ? cf_iff(a, b) : nullptr;
    }
    case ExprKind::Neq: {
      CFormulaPtr a = gamma_expr(e->a, pm, err), b = gamma_expr(e->b, pm, err);
      return a && b ? cf_not(cf_iff(a, b)) : nullptr;
    }
    case ExprKind::Star: return fail("cannot concretize a nondeterministic expression");
    case ExprKind::Choose: return fail("cannot concretize a choose expression");
    case ExprKind::UnknownRef: return fail("cannot concretize an unresolved placeholder");
  }
  return fail("cannot concretize expression");
}

}  // namespace bp
