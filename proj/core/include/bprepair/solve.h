#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bprepair/encode.h"
#include "bprepair/hoare.h"
#include "bprepair/semantics.h"

namespace bp {

struct RepairChoice {
  std::string label;
  UpdateSchema schema = UpdateSchema::Id;
  int64_t cost = 0;
};

// A full assignment to the unknowns, independent of where it came from
// (internal solver model or an external solver's get-model response).
// Tables are indexed by the packed scope valuation of their node.
struct SolutionModel {
  std::map<int, UpdateSchema> schema;              // statement node -> choice
  std::map<int, TruthTable> guard;                 // assume->assume tables
  std::map<int, std::vector<TruthTable>> assign;   // per scope variable
  std::map<int, std::vector<TruthTable>> callargs; // per callee formal
  Proof proof;                                     // cutpoint tables
};

// Rewrite the program per the model's schema choices and tables.
Program apply_solution(const TransitionGraph& g, const SolutionModel& m);

// Read a SolutionModel out of a satisfiable ground encoding.
SolutionModel model_from_encoding(const TransitionGraph& g, const std::vector<int>& cutset,
                                  const Encoding& enc);

struct BudgetAttempt {
  int64_t budget = 0;
  bool satisfiable = false;
  size_t vars = 0, clauses = 0;
  double encode_seconds = 0, solve_seconds = 0;
  bool used_preferences = false;  // satisfied with the pinned guard tables
};

struct RepairResult {
  enum class Status { Repaired, Unrepairable, Inconclusive };
  Status status = Status::Unrepairable;
  std::string message;
  std::optional<Program> repaired;
  Proof proof;                         // keyed by original graph node ids
  std::vector<RepairChoice> choices;   // non-identity rewrites only
  int64_t total_cost = 0;
  int64_t budget_used = 0;
  std::map<int, int64_t> cost_valuation;  // cutpoint node -> cumulative cost
  std::vector<BudgetAttempt> attempts;
  int num_assign = 0, num_assume = 0;
  std::string verdict_note;
  bool solver_failure = false;  // external solver crashed or gave garbage
};

struct SolveOptions {
  int64_t initial_budget = 1;
  int64_t budget_cap = 8;
  ExecOptions exec;               // semantic re-check bounds
  size_t max_blocked_models = 64; // re-solves after a semantically bad model
  size_t max_branch_states = 1 << 20;
  // expand: ground everything and use the built-in solver. external: write
  // a quantified script per budget and run solver_cmd on it.
  enum class Strategy { Expand, External };
  Strategy strategy = Strategy::Expand;
  std::string solver_cmd;
  std::string script_dir;  // where external scripts land; empty = temp dir
};

// Iterate budgets from initial to cap: encode, solve (with the cost model's
// preferred guard tables pinned first, then unpinned), extract the rewrite
// and its Floyd proof, and re-check both the proof and the program semantics
// before accepting.
RepairResult solve_repair(const TransitionGraph& g, const std::vector<int>& cutset,
                          const std::vector<VerificationPath>& paths, const CostModel& cm,
                          const SolveOptions& opt, DiagnosticSink& sink);

// Model extraction, exposed for tests.
Program extract_program(const TransitionGraph& g, const Encoding& enc);
Proof extract_proof(const TransitionGraph& g, const std::vector<int>& cutset,
                    const Encoding& enc);

}  // namespace bp
