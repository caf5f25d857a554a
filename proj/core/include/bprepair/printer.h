#pragma once

#include <string>

#include "bprepair/ast.h"

namespace bp {

// Canonical source form. Every statement is printed with its label (including
// synthesized ones), so parse(print(p)) equals p up to auto-label flags.
std::string print_program(const Program& p);

// One statement, no label and no trailing ';'. Structured statements span
// multiple lines; `indent` is the column of their first character.
std::string print_statement(const Statement& s, int indent = 0);

}  // namespace bp
