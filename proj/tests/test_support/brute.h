#pragma once

#include <cstdint>

#include "bprepair/cfg.h"
#include "bprepair/schemas.h"

namespace testsup {

enum class BruteVerdict { Repairable, Unrepairable, Inconclusive };

// Exhaustive repairability check for call-free programs, independent of the
// engine's constraint encoding: enumerate every assignment of schemas to
// statements with total cost <= budget, then search the unknown truth tables
// by branching lazily on the bits an execution actually consults. A table
// choice is accepted when every initial valuation runs without reaching err
// (blocked plain assumes do not count as failures, matching the default
// semantics). `max_steps` bounds total edge traversals; exceeding it without
// finding a repair gives Inconclusive.
BruteVerdict brute_repairable(const bp::TransitionGraph& g, const bp::CostModel& cm,
                              int64_t budget, uint64_t max_steps = 200000000);

}  // namespace testsup
