#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "bprepair/expr.h"

namespace bp {

// Statement forms. If is the structured conditional with nested bodies;
// IfJump is the flat two-way branch `if (g) goto A [else goto B]` used by
// control-flow-faithful program dumps (no extra node for the jump).
enum class StmtKind { Skip, Assign, If, IfJump, While, Assume, Assert, Call, Return, Goto };

struct LabeledStatement;

struct Statement {
  StmtKind kind = StmtKind::Skip;
  ExprPtr guard;                       // If/IfJump/While/Assume/Assert
  std::vector<std::string> targets;    // Assign left-hand sides
  std::vector<ExprPtr> rhs;            // Assign right-hand sides / Call arguments
  std::string callee;                  // Call
  std::vector<std::string> labels;     // Goto targets; IfJump: [then] or [then, else]
  std::vector<LabeledStatement> then_body, else_body;  // If bodies; While uses then_body
};

struct LabeledStatement {
  std::string label;
  bool auto_label = false;  // label was synthesized during parsing
  Statement stmt;
  int line = 0, col = 0;
};

struct VarDecl {
  std::string name;
  int line = 0, col = 0;
};

struct Procedure {
  std::string name;
  std::vector<std::string> formals;
  std::vector<VarDecl> decls;  // locals declared in the body (formals are locals too)
  std::vector<LabeledStatement> body;
  int line = 0, col = 0;

  // All locals: formals first, then declared locals.
  std::vector<std::string> locals() const {
    std::vector<std::string> v = formals;
    for (const auto& d : decls) v.push_back(d.name);
    return v;
  }
};

struct Program {
  std::vector<VarDecl> globals;
  std::vector<Procedure> procedures;  // index 0 = main after validation

  const Procedure* find_procedure(const std::string& name) const {
    for (const auto& p : procedures)
      if (p.name == name) return &p;
    return nullptr;
  }
  int procedure_index(const std::string& name) const {
    for (size_t i = 0; i < procedures.size(); ++i)
      if (procedures[i].name == name) return static_cast<int>(i);
    return -1;
  }
  // Variables in scope inside procedure i: globals in declaration order,
  // then formals, then declared locals. This order fixes truth-table rows.
  std::vector<std::string> inscope(size_t proc_index) const {
    std::vector<std::string> v;
    for (const auto& g : globals) v.push_back(g.name);
    for (const auto& l : procedures[proc_index].locals()) v.push_back(l);
    return v;
  }
};

// Statement types: skip, assign, assume, assert, call, return, goto.
// Branch statements are typed assume (their guards live on assume edges).
enum class StatementType { Skip, Assign, Assume, Assert, Call, Return, Goto };

inline StatementType statement_type(const Statement& s) {
  switch (s.kind) {
    case StmtKind::Skip: return StatementType::Skip;
    case StmtKind::Assign: return StatementType::Assign;
    case StmtKind::If:
    case StmtKind::IfJump:
    case StmtKind::While:
    case StmtKind::Assume: return StatementType::Assume;
    case StmtKind::Assert: return StatementType::Assert;
    case StmtKind::Call: return StatementType::Call;
    case StmtKind::Return: return StatementType::Return;
    case StmtKind::Goto: return StatementType::Goto;
  }
  return StatementType::Skip;
}

const char* statement_type_name(StatementType t);

// Structural equality ignoring source positions and auto-label flags.
bool statement_equal(const Statement& a, const Statement& b);
bool program_equal(const Program& a, const Program& b);

// Total number of statements including nested bodies.
size_t count_statements(const std::vector<LabeledStatement>& body);
size_t count_statements(const Program& p);

// Depth-first visit over all labeled statements (outer statement before its bodies).
void for_each_statement(const std::vector<LabeledStatement>& body,
                        const std::function<void(const LabeledStatement&)>& fn);
void for_each_statement(const Program& p,
                        const std::function<void(const LabeledStatement&)>& fn);

}  // namespace bp
