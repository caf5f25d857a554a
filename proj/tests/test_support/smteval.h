#pragma once

#include <map>
#include <string>

#include "bprepair/expr.h"
#include "bprepair/smtlib.h"
#include "bprepair/solve.h"

// A tiny SMT-LIB reader used to cross-check emitted repair queries without a
// real solver. It covers exactly the constructs the emitter produces: Bool
// constants, quoted |var@step| symbols, integer literals, and/or/not/=>/=/
// ite/<=/+, define-fun macros, and forall over Bool variables (expanded by
// enumeration). Every (assert ...) form is evaluated under a fixed model.
namespace smteval {

struct Model {
  std::map<std::string, bool> bools;           // 0-ary Bool symbols (selectors)
  std::map<std::string, bp::TruthTable> funs;  // Bool^n -> Bool, row bit i = arg i
};

// Interprets a candidate solution as a model for a job: selector booleans from
// the chosen schemas, every declared unknown function as a truth table (tables
// the solution leaves open default to all-false, like the model parser does).
Model model_from_solution(const bp::SmtJob& job, const bp::SolutionModel& sol);

// Renders the solution as a get-model response ("sat" line plus a list of
// define-funs with x!i parameters), suitable for parse_smt_model.
std::string render_model_response(const bp::SmtJob& job, const bp::SolutionModel& sol);

// True when every assert in the script holds under the model. On failure or
// on an unsupported construct, returns false and describes the reason.
bool eval_script(const std::string& script, const Model& model, std::string* why);

}  // namespace smteval
