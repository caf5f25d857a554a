#include "bprepair/diagnostics.h"

namespace bp {

const char* diag_code_name(DiagCode c) {
  switch (c) {
    case DiagCode::SyntaxError: return "SyntaxError";
    case DiagCode::DuplicateVariable: return "DuplicateVariable";
    case DiagCode::DuplicateLabel: return "DuplicateLabel";
    case DiagCode::DuplicateProcedure: return "DuplicateProcedure";
    case DiagCode::DuplicateFormal: return "DuplicateFormal";
    case DiagCode::MissingMain: return "MissingMain";
    case DiagCode::MainCalled: return "MainCalled";
    case DiagCode::UnknownProcedure: return "UnknownProcedure";
    case DiagCode::ArityMismatch: return "ArityMismatch";
    case DiagCode::NondeterministicAssertGuard: return "NondeterministicAssertGuard";
    case DiagCode::NondeterministicAssumeGuard: return "NondeterministicAssumeGuard";
    case DiagCode::NondeterministicCallArg: return "NondeterministicCallArg";
    case DiagCode::NondeterministicChooseArg: return "NondeterministicChooseArg";
    case DiagCode::NondeterministicOperand: return "NondeterministicOperand";
    case DiagCode::UnknownLabel: return "UnknownLabel";
    case DiagCode::UnboundVariable: return "UnboundVariable";
    case DiagCode::WhileBodyMustEndInSkip: return "WhileBodyMustEndInSkip";
    case DiagCode::NodeOffEntryExitPath: return "NodeOffEntryExitPath";
    case DiagCode::PathCapExceeded: return "PathCapExceeded";
    case DiagCode::BadInput: return "BadInput";
  }
  return "Unknown";
}

std::string Diagnostic::format() const {
  std::string s = severity == Severity::Error ? "error:" : "warning:";
  s += file + ":" + std::to_string(line) + ":" + std::to_string(col) + ":";
  s += diag_code_name(code);
  s += ": ";
  s += message;
  return s;
}

std::string DiagnosticSink::format_all() const {
  std::string s;
  for (const auto& d : items) {
    s += d.format();
    s += '\n';
  }
  return s;
}

}  // namespace bp
