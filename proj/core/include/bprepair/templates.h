#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "bprepair/concrete.h"
#include "bprepair/diagnostics.h"

namespace bp {

// The built-in linear expression template: guards take the single-atom shape
// c0 + sum of c_p*v_p <= 0 and assignment right-hand sides the term shape
// c0 + sum of c_p*v_p. Parameter searches try small magnitudes first.
struct LinearTemplate {
  bool integer_only = false;
  int coeff_bound = 12;  // iterative-deepening cap on parameter numerators
  int den_bound = 3;     // largest denominator tried when rationals are on
  // target variable -> fixed coefficients; key "const" pins the constant term
  std::map<std::string, std::map<std::string, Rational>> pins;
  std::set<std::string> freeze;  // variables forced to v := v
};

// Per-location template choice; "default" covers unlisted locations.
struct TemplateAssignment {
  std::optional<LinearTemplate> fallback;
  std::map<std::string, LinearTemplate> at_label;

  const LinearTemplate* lookup(const std::string& label) const {
    auto it = at_label.find(label);
    if (it != at_label.end()) return &it->second;
    return fallback ? &*fallback : nullptr;
  }
};

// Parse the JSON template file:
//   { "default": {"kind": "linear", "integer_only": true, "coeff_bound": 12,
//                 "den_bound": 3, "freeze": ["x"],
//                 "pins": {"y": {"x": -1, "const": 10}}},
//     "locations": {"l4": { ... }} }
// Pin values are integers or "n/d" strings. Only the linear kind exists.
std::optional<TemplateAssignment> load_template_assignment(const std::string& json_text,
                                                           const std::string& filename,
                                                           DiagnosticSink& sink);

// Membership in the guard grammar: negations and conjunctions of linear
// atoms (every comparison here is <=, < or ==, so any atom qualifies).
// Disjunctions and the constants true/false are outside the grammar.
bool in_guard_grammar(const CFormulaPtr& f);

}  // namespace bp
