#include "bprepair/ast.h"

namespace bp {

const char* statement_type_name(StatementType t) {
  switch (t) {
    case StatementType::Skip: return "skip";
    case StatementType::Assign: return "assign";
    case StatementType::Assume: return "assume";
    case StatementType::Assert: return "assert";
    case StatementType::Call: return "call";
    case StatementType::Return: return "return";
    case StatementType::Goto: return "goto";
  }
  return "?";
}

static bool body_equal(const std::vector<LabeledStatement>& a,
                       const std::vector<LabeledStatement>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].label != b[i].label) return false;
    if (!statement_equal(a[i].stmt, b[i].stmt)) return false;
  }
  return true;
}

bool statement_equal(const Statement& a, const Statement& b) {
  if (a.kind != b.kind) return false;
  if (!expr_equal(a.guard, b.guard)) return false;
  if (a.targets != b.targets || a.callee != b.callee || a.labels != b.labels) return false;
  if (a.rhs.size() != b.rhs.size()) return false;
  for (size_t i = 0; i < a.rhs.size(); ++i)
    if (!expr_equal(a.rhs[i], b.rhs[i])) return false;
  return body_equal(a.then_body, b.then_body) && body_equal(a.else_body, b.else_body);
}

bool program_equal(const Program& a, const Program& b) {
  if (a.globals.size() != b.globals.size()) return false;
  for (size_t i = 0; i < a.globals.size(); ++i)
    if (a.globals[i].name != b.globals[i].name) return false;
  if (a.procedures.size() != b.procedures.size()) return false;
  for (size_t i = 0; i < a.procedures.size(); ++i) {
    const auto& pa = a.procedures[i];
    const auto& pb = b.procedures[i];
    if (pa.name != pb.name || pa.formals != pb.formals) return false;
    if (pa.decls.size() != pb.decls.size()) return false;
    for (size_t j = 0; j < pa.decls.size(); ++j)
      if (pa.decls[j].name != pb.decls[j].name) return false;
    if (!body_equal(pa.body, pb.body)) return false;
  }
  return true;
}

size_t count_statements(const std::vector<LabeledStatement>& body) {
  size_t n = 0;
  for (const auto& ls : body) {
    n += 1;
    n += count_statements(ls.stmt.then_body);
    n += count_statements(ls.stmt.else_body);
  }
  return n;
}

size_t count_statements(const Program& p) {
  size_t n = 0;
  for (const auto& proc : p.procedures) n += count_statements(proc.body);
  return n;
}

void for_each_statement(const std::vector<LabeledStatement>& body,
                        const std::function<void(const LabeledStatement&)>& fn) {
  for (const auto& ls : body) {
    fn(ls);
    for_each_statement(ls.stmt.then_body, fn);
    for_each_statement(ls.stmt.else_body, fn);
  }
}

void for_each_statement(const Program& p,
                        const std::function<void(const LabeledStatement&)>& fn) {
  for (const auto& proc : p.procedures) for_each_statement(proc.body, fn);
}

}  // namespace bp
