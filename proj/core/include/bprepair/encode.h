#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bprepair/cfg.h"
#include "bprepair/hoare.h"
#include "bprepair/satsolver.h"
#include "bprepair/schemas.h"

namespace bp {

// One rewritable program location: its statement node, the schemas the cost
// model allows there (identity first), one selector variable per schema
// (exactly one true), and each schema's cost at this label.
struct LocationInfo {
  int node = -1;
  std::vector<UpdateSchema> schemas;
  std::vector<Lit> sel;
  std::vector<int64_t> cost;
};

// Truth-table variables for the unknown expressions a schema introduces:
// a guard table for assume->assume, one table per scope variable for the
// full-width assign->assign, one table per callee formal for call->call.
// Tables are indexed by the packed valuation of the node's scope.
struct UnknownTables {
  std::map<int, std::vector<Lit>> guard;
  std::map<int, std::vector<std::vector<Lit>>> assign;
  std::map<int, std::vector<std::vector<Lit>>> callargs;
};

struct Encoding {
  std::unique_ptr<SatSolver> solver;
  std::vector<LocationInfo> locations;  // statement nodes in graph order
  std::map<int, int> loc_of_node;
  UnknownTables unknowns;
  // Cutpoint assertion tables; main's entry is pinned to `true` and has no
  // variables here.
  std::map<int, std::vector<Lit>> invariant;
  int64_t budget = 0;
  size_t num_vars = 0, num_clauses = 0;
};

struct EncodeOptions {
  int64_t budget = 1;
  // Abort if a single path/schema walk branches beyond this many states.
  size_t max_branch_states = 1 << 20;
};

// Ground the whole repair query for one budget value: selector variables
// with their exactly-one constraints, unknown-table and assertion-table
// variables, one clause per surviving (path, schema choice, start valuation,
// branch) tuple, and a weighted counter capping the summed rewrite cost.
std::optional<Encoding> encode_repair(const TransitionGraph& g, const std::vector<int>& cutset,
                                      const std::vector<VerificationPath>& paths,
                                      const CostModel& cm, const EncodeOptions& opt,
                                      DiagnosticSink& sink);

}  // namespace bp
