#pragma once

#include <random>

#include "bprepair/ast.h"

namespace testsup {

struct GenOptions {
  int min_vars = 2, max_vars = 4;
  int max_stmts = 12;  // counting nested statements and the final assert
  bool allow_loop = true;
};

// Random structured call-free program over global booleans, ending in an
// assert synthesized from the reachable states at that point, so every seed
// is partially correct by construction.
bp::Program random_correct_program(std::mt19937& rng, const GenOptions& opt = {});

// One random edit: replace an assignment right-hand side or a guard with a
// fresh random expression. Keeps all validity invariants (assume/assert
// guards stay deterministic) and the program shape.
bp::Program mutate(const bp::Program& p, std::mt19937& rng);

// Random deterministic expression over `vars`, depth-bounded.
bp::ExprPtr random_expr(std::mt19937& rng, const std::vector<std::string>& vars, int depth = 2);

// Loop-free chain of n statements used for scaling measurements; ends with a
// synthesized assert like the random seeds.
bp::Program straightline_program(std::mt19937& rng, int n, int nvars);

}  // namespace testsup
