#include "bprepair/printer.h"

namespace bp {

namespace {

std::string pad(int n) { return std::string(n, ' '); }

void print_seq(const std::vector<LabeledStatement>& body, int indent, std::string& out);

void print_stmt_into(const Statement& s, int indent, std::string& out) {
  switch (s.kind) {
    case StmtKind::Skip:
      out += "skip";
      break;
    case StmtKind::Return:
      out += "return";
      break;
    case StmtKind::Assume:
      out += "assume (" + expr_to_string(s.guard) + ")";
      break;
    case StmtKind::Assert:
      out += "assert (" + expr_to_string(s.guard) + ")";
      break;
    case StmtKind::Assign: {
      for (size_t i = 0; i < s.targets.size(); ++i) {
        if (i) out += ", ";
        out += s.targets[i];
      }
      out += " := ";
      for (size_t i = 0; i < s.rhs.size(); ++i) {
        if (i) out += ", ";
        out += expr_to_string(s.rhs[i]);
      }
      break;
    }
    case StmtKind::Call: {
      out += "call " + s.callee + "(";
      for (size_t i = 0; i < s.rhs.size(); ++i) {
        if (i) out += ", ";
        out += expr_to_string(s.rhs[i]);
      }
      out += ")";
      break;
    }
    case StmtKind::Goto: {
      out += "goto ";
      for (size_t i = 0; i < s.labels.size(); ++i) {
        if (i) out += " or ";
        out += s.labels[i];
      }
      break;
    }
    case StmtKind::IfJump: {
      out += "if (" + expr_to_string(s.guard) + ") goto " + s.labels[0];
      if (s.labels.size() > 1) out += " else goto " + s.labels[1];
      break;
    }
    case StmtKind::If: {
      out += "if (" + expr_to_string(s.guard) + ") then\n";
      print_seq(s.then_body, indent + 2, out);
      if (!s.else_body.empty()) {
        out += pad(indent) + "else\n";
        print_seq(s.else_body, indent + 2, out);
      }
      out += pad(indent) + "fi";
      break;
    }
    case StmtKind::While: {
      out += "while (" + expr_to_string(s.guard) + ") do\n";
      print_seq(s.then_body, indent + 2, out);
      out += pad(indent) + "od";
      break;
    }
  }
}

void print_seq(const std::vector<LabeledStatement>& body, int indent, std::string& out) {
  for (const auto& ls : body) {
    out += pad(indent) + ls.label + ": ";
    print_stmt_into(ls.stmt, indent, out);
    out += ";\n";
  }
}

void print_decls(const std::vector<VarDecl>& decls, int indent, std::string& out) {
  if (decls.empty()) return;
  out += pad(indent) + "decl ";
  for (size_t i = 0; i < decls.size(); ++i) {
    if (i) out += ", ";
    out += decls[i].name;
  }
  out += ";\n";
}

}  // namespace

std::string print_statement(const Statement& s, int indent) {
  std::string out;
  print_stmt_into(s, indent, out);
  return out;
}

std::string print_program(const Program& p) {
  std::string out;
  print_decls(p.globals, 0, out);
  for (const auto& proc : p.procedures) {
    if (!out.empty()) out += "\n";
    out += proc.name + "(";
    for (size_t i = 0; i < proc.formals.size(); ++i) {
      if (i) out += ", ";
      out += proc.formals[i];
    }
    out += ")\nbegin\n";
    print_decls(proc.decls, 2, out);
    print_seq(proc.body, 2, out);
    out += "end\n";
  }
  return out;
}

}  // namespace bp
