#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "bprepair/cfg.h"
#include "bprepair/expr.h"

namespace testsup {

// Reference executor for call-free programs: a naive worklist fixpoint over
// (node, packed valuation) pairs, stepping edge by edge with the expression-
// level evaluator. Deliberately independent of the semantics module's packed
// bit machinery so the two can check each other.
struct RefResult {
  bool error_reached = false;
  bool stuck_reached = false;  // some plain assume blocked every successor
  bool unsupported = false;    // program contains a call
  std::set<std::pair<int, uint64_t>> reached;
};

RefResult ref_explore(const bp::TransitionGraph& g);

// Reachable-valuation table at one node: row r is true iff the valuation
// packing the node's procedure scope (bit i = scope var i) as r is reachable.
bp::TruthTable ref_states_at(const RefResult& r, const bp::TransitionGraph& g, int node);

// Packing helpers shared by the support tools.
bp::Env unpack_env(const std::vector<std::string>& vars, uint64_t val);
uint64_t pack_env(const std::vector<std::string>& vars, const bp::Env& env);

// All joint outcomes of a parallel assignment statement from `env`.
std::vector<uint64_t> assign_images(const bp::Statement& s, const bp::Env& env,
                                    const std::vector<std::string>& vars, uint64_t val);

}  // namespace testsup
