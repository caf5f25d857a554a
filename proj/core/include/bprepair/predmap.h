#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bprepair/ast.h"
#include "bprepair/concrete.h"
#include "bprepair/diagnostics.h"

namespace bp {

// The abstraction map: each Boolean program variable stands for a predicate
// over the concrete numeric variables.
struct PredicateMap {
  std::vector<std::string> variables;        // concrete variables, declaration order
  std::map<std::string, Sort> sorts;
  std::map<std::string, CFormulaPtr> preds;  // boolean var -> predicate

  bool has(const std::string& bool_var) const { return preds.count(bool_var) > 0; }
};

// Parse the JSON predicate map:
//   { "variables": [{"name": "x", "sort": "int"}],
//     "predicates": {"b0": "x <= 1"} }
// Sorts are "int" or "real"; predicate text uses the concrete infix grammar.
std::optional<PredicateMap> load_predicate_map(const std::string& json_text,
                                               const std::string& filename, DiagnosticSink& sink);

// Every Boolean variable of the program must be mapped; returns the first
// unmapped name, or nothing when the map covers the program.
std::optional<std::string> predicate_map_gap(const PredicateMap& pm, const Program& prog);

// Homomorphic extension of the map to Boolean expressions: constants and
// connectives carry over, = becomes iff and != its negation. Returns null and
// fills err on an unmapped variable or a nondeterministic subexpression.
CFormulaPtr gamma_expr(const ExprPtr& e, const PredicateMap& pm, std::string* err);

}  // namespace bp
