#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "bprepair/cfg.h"

namespace bp {

// Variables visible inside one procedure, with their bit positions in a
// packed valuation (bit k = vars[k]; globals first, so the global prefix is
// position-compatible across procedures).
struct Scope {
  std::vector<std::string> vars;
  std::unordered_map<std::string, int> index;

  static Scope for_proc(const Program& p, size_t proc_index);
  bool bit(uint64_t val, const std::string& name) const {
    return (val >> index.at(name)) & 1;
  }
};

// Evaluate a deterministic expression over a packed valuation.
bool eval_bits(const ExprPtr& e, uint64_t val, const Scope& sc);

// Values an assignment right-hand side can take: one for deterministic
// expressions, both for `*`, and choose(a,b) by its table.
std::vector<bool> possible_bits(const ExprPtr& e, uint64_t val, const Scope& sc);

std::string val_to_string(uint64_t val, const Scope& sc);

enum class VerdictKind { PartiallyCorrect, ErrorReached, StuckReached, BoundExceeded };

struct TraceStep {
  int node = -1;
  uint64_t val = 0;  // packed in the scope of the node's procedure
};

struct Verdict {
  VerdictKind kind = VerdictKind::PartiallyCorrect;
  std::vector<TraceStep> trace;  // ErrorReached / StuckReached witness
  std::string note;
};

const char* verdict_kind_name(VerdictKind k);

struct ExecOptions {
  size_t max_stack = 8;          // call depth bound
  size_t max_configs = 1 << 22;  // explored-configuration bound
  bool strict_stuck = false;     // report a false plain assume instead of pruning
};

// Explore all executions from every initial valuation of the variables in
// scope at main's entry. Breadth first with memoization; an assertion
// violation wins over every other verdict, a hit resource bound makes a
// clean result inconclusive.
Verdict check_partial_correctness(const TransitionGraph& g, const ExecOptions& opt = {});

// Same exploration from one chosen initial valuation.
Verdict run_from(const TransitionGraph& g, uint64_t initial_val, const ExecOptions& opt = {});

std::string format_trace(const TransitionGraph& g, const Verdict& v);

}  // namespace bp
