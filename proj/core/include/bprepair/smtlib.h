#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bprepair/cfg.h"
#include "bprepair/schemas.h"
#include "bprepair/solve.h"

namespace bp {

// One quantified repair query. The unknowns stay symbolic: selector Booleans
// per (location, schema), one uninterpreted Bool^n -> Bool function per
// unknown table, one per cutpoint assertion. Every verification path turns
// into universally quantified implications over per-step variable copies,
// and the cost bound is an integer ite-sum over the selectors.
struct SmtJob {
  std::string script;

  struct Sel {
    int node = -1;
    UpdateSchema schema = UpdateSchema::Id;
    std::string symbol;
  };
  // kind: 'g' guard table, 'a' assign table (index = scope position),
  // 'c' call argument table (index = formal position), 'i' cutpoint table.
  struct Fun {
    std::string symbol;
    int node = -1;
    int arity = 0;
    char kind = 'g';
    int index = 0;
  };
  std::vector<Sel> sels;
  std::vector<Fun> funs;
  int64_t budget = 0;
};

SmtJob emit_smt(const TransitionGraph& g, const std::vector<int>& cutset,
                const std::vector<VerificationPath>& paths, const CostModel& cm,
                int64_t budget);

// Turn a get-model response (with or without the leading `sat` line and the
// optional `model` keyword) into a SolutionModel for the job. Unknown
// symbols are ignored; a missing table defaults to all-false; a location
// whose selectors are all false or absent is an error.
std::optional<SolutionModel> parse_smt_model(const SmtJob& job, const TransitionGraph& g,
                                             const std::vector<int>& cutset,
                                             const std::string& response, std::string* error);

// Appendable blocker: an assertion ruling out exactly this model's selector
// and table values, for re-running the solver after a semantic rejection.
std::string smt_blocking_assert(const SmtJob& job, const SolutionModel& m,
                                const TransitionGraph& g);

struct SolverRun {
  enum class Outcome { Sat, Unsat, Unknown, Failed };
  Outcome outcome = Outcome::Failed;
  std::string model;   // text after the verdict line
  std::string detail;  // raw output or failure description
};

// Run `cmd <script_path>` through the shell and classify the first
// non-empty output line.
SolverRun run_solver_command(const std::string& cmd, const std::string& script_path);

}  // namespace bp
