#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bprepair/cfg.h"
#include "bprepair/hoare.h"
#include "bprepair/predmap.h"
#include "bprepair/solve.h"
#include "bprepair/templates.h"

namespace bp {

struct ConcretizeOptions {
  bool integer_only = false;      // forbid fractional parameters everywhere
  int max_members = 1;            // members to enumerate per concrete set
  size_t candidate_cap = 200000;  // validity checks per synthesized statement
};

// One member of a synthesized assignment: the surviving (non-redundant)
// concrete updates plus their rendering ("skip" when everything elided).
struct AssignMember {
  std::vector<std::pair<std::string, LinTerm>> updates;
  std::string text;
};

struct AssignSynthesis {
  bool found = false;
  std::vector<AssignMember> members;
  std::string note;  // emptiness reason or search remarks
};

struct GuardSynthesis {
  bool found = false;
  std::vector<CAtom> atoms;  // template-shaped: term <= 0
  std::string note;
};

// A modified statement lifted to the concrete level. An empty statement list
// is a first-class outcome, explained by the note.
struct ConcreteChange {
  std::string label;
  UpdateSchema schema = UpdateSchema::Id;
  std::string abstract_text;            // repaired boolean statement
  std::vector<std::string> statements;  // rendered members of the set
  std::vector<std::string> exprs;       // bare expression texts of the first
                                        // member (guard, args, or RHS terms)
  std::string note;
};

struct ConcretizeResult {
  bool ok = true;
  std::string error;  // input-level failure: unmapped variable, bad label...
  std::vector<ConcreteChange> changes;
  std::vector<std::pair<std::string, std::string>> proof;  // cutpoint -> assertion
};

// Lift every modified statement and the proof through the predicate map.
// Without templates, guards and call arguments map homomorphically (then
// simplify) and assignments search the free linear term space; a template
// assignment additionally forces guards and call arguments into single
// linear atoms and constrains assignment terms by its pins and freezes.
// `graph` is the original program's graph (choice labels and proof keys
// refer to it); `repaired` supplies the statements to concretize.
ConcretizeResult concretize_repair(const TransitionGraph& graph, const Program& repaired,
                                   const std::vector<RepairChoice>& choices, const Proof& proof,
                                   const PredicateMap& pm, const TemplateAssignment* templates,
                                   const ConcretizeOptions& opt);

// gamma(g) simplified; null with err on unmapped or nondeterministic input.
CFormulaPtr concretize_guard_simple(const ExprPtr& g, const PredicateMap& pm, std::string* err);

// Single linear atom equivalent to `target` (the gamma image of a guard):
// constructive for targets over at most one variable, bounded search above.
GuardSynthesis synthesize_guard_atom(const CFormulaPtr& target, const PredicateMap& pm,
                                     const LinearTemplate& t, const ConcretizeOptions& opt);

// Concrete parallel assignment whose effect matches the Boolean assignment
// bool_vars := rhs under the map: search for terms h_v making every mapped
// predicate's new value equal its assigned expression's image. Callers pass
// the full scope width (unassigned variables as b := b rows).
AssignSynthesis synthesize_assign(const std::vector<std::string>& bool_vars,
                                  const std::vector<ExprPtr>& rhs, const PredicateMap& pm,
                                  const LinearTemplate& t, const ConcretizeOptions& opt);

// gamma of one proof table (true rows over `vars`), simplified and rendered.
std::string concretize_assertion(const TruthTable& table, const std::vector<std::string>& vars,
                                 const PredicateMap& pm, std::string* err);

}  // namespace bp
