#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bprepair/cfg.h"
#include "bprepair/semantics.h"

namespace bp {

// Variables an assertion at this node ranges over: globals plus formals for
// a non-main exit node (callers cannot see callee locals), the full scope
// otherwise. Bit k of a row index is variable k of this list.
std::vector<std::string> assertion_vars(const TransitionGraph& g, int node);

// A candidate Floyd proof: one truth table per cutpoint over that node's
// assertion variables.
struct Proof {
  std::map<int, TruthTable> at;
};

// Forward image along a path: the valuations reachable from the given start
// set by executing the path's edges. Call edges are their own single-edge
// paths and are not handled here.
std::vector<bool> post_states(const TransitionGraph& g, const VerificationPath& path,
                              const std::vector<bool>& pre);

// Check all conditions that make `proof` establish partial correctness:
//   - main's entry assertion accepts every valuation (all states are initial),
//   - every assert cutpoint's assertion implies the assert guard,
//   - for every path, states reachable from the source assertion satisfy the
//     target assertion,
//   - call paths: the caller assertion pushes into the callee entry (for all
//     values of callee non-formal locals), and whatever the callee exit
//     assertion says about globals and arguments transfers to the return node.
// Returns a description of the first violated condition, or nothing.
std::optional<std::string> check_proof(const TransitionGraph& g, const std::vector<int>& cutset,
                                       const std::vector<VerificationPath>& paths,
                                       const Proof& proof);

}  // namespace bp
