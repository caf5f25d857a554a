#pragma once

#include <string>
#include <vector>

namespace bp {

enum class Severity { Error, Warning };

// Stable machine-readable diagnostic codes. The text after the code is
// free-form; tooling should key on the code only.
enum class DiagCode {
  SyntaxError,
  DuplicateVariable,
  DuplicateLabel,
  DuplicateProcedure,
  DuplicateFormal,
  MissingMain,
  MainCalled,
  UnknownProcedure,
  ArityMismatch,
  NondeterministicAssertGuard,
  NondeterministicAssumeGuard,
  NondeterministicCallArg,
  NondeterministicChooseArg,
  NondeterministicOperand,
  UnknownLabel,
  UnboundVariable,
  WhileBodyMustEndInSkip,
  NodeOffEntryExitPath,
  PathCapExceeded,
  BadInput,
};

const char* diag_code_name(DiagCode c);

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string file;
  int line = 0;
  int col = 0;
  DiagCode code = DiagCode::SyntaxError;
  std::string message;

  // "error:FILE:LINE:COL:CODE: message"
  std::string format() const;
};

struct DiagnosticSink {
  std::vector<Diagnostic> items;

  void error(std::string file, int line, int col, DiagCode code, std::string msg) {
    items.push_back({Severity::Error, std::move(file), line, col, code, std::move(msg)});
  }
  void warning(std::string file, int line, int col, DiagCode code, std::string msg) {
    items.push_back({Severity::Warning, std::move(file), line, col, code, std::move(msg)});
  }
  bool has_errors() const {
    for (const auto& d : items)
      if (d.severity == Severity::Error) return true;
    return false;
  }
  std::string format_all() const;
};

}  // namespace bp
