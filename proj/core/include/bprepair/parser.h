#pragma once

#include <optional>
#include <string>

#include "bprepair/ast.h"
#include "bprepair/diagnostics.h"

namespace bp {

struct ParseResult {
  std::optional<Program> program;  // set iff no error diagnostics
  DiagnosticSink diags;
};

// Parse and validate a program. On success every statement carries a label
// (synthetic `l_auto_N` labels fill the gaps) and `main` is procedure 0.
ParseResult parse_program(const std::string& text, const std::string& filename = "<input>");

// Semantic checks over a syntactically well-formed program (name uniqueness,
// label resolution, call arity, guard determinism, while-body shape).
void validate_program(const Program& p, const std::string& filename, DiagnosticSink& sink);

}  // namespace bp
