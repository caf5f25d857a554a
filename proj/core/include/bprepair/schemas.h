#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bprepair/ast.h"
#include "bprepair/diagnostics.h"

namespace bp {

// How a single statement may be rewritten. Identity is always available and
// always free. Branch and plain assume statements share the assume type;
// assume->skip only makes sense for plain assumes and is off by default.
// Asserts are the correctness reference point and are never rewritten.
enum class UpdateSchema { Id, AssignAssign, AssignSkip, AssumeAssume, AssumeSkip, CallCall, CallSkip };

const char* schema_name(UpdateSchema u);  // "id", "assign->assign", ...
std::optional<UpdateSchema> schema_from_name(const std::string& name);

struct CostOverride {
  std::string label;
  UpdateSchema schema = UpdateSchema::Id;
  int64_t cost = 0;
};

struct CostModel {
  std::map<UpdateSchema, int64_t> default_costs;  // every non-id schema costs 1 by default
  std::vector<CostOverride> overrides;
  std::optional<int64_t> budget;               // starting budget, if the file pins one
  std::set<UpdateSchema> disabled;             // schemas removed from the space
  std::set<UpdateSchema> enabled;              // opt-ins (assume->skip)
  std::map<std::string, std::string> preferred_guards;  // label -> guard expression text

  static CostModel defaults();
  int64_t cost(UpdateSchema u, const std::string& label) const;
  bool allowed(UpdateSchema u) const;
};

// Parse the JSON cost model; diagnostics on malformed input (BadInput).
std::optional<CostModel> load_cost_model(const std::string& json_text,
                                         const std::string& filename, DiagnosticSink& sink);

// Schemas that may rewrite this statement, identity first, in enum order.
std::vector<UpdateSchema> applicable_schemas(const Statement& s, const CostModel& cm);

}  // namespace bp
