#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bprepair/cfg.h"
#include "bprepair/concretize.h"
#include "bprepair/semantics.h"
#include "bprepair/solve.h"

namespace bp {

// Everything a command learned, rendered as report.json plus report.txt.
// Optional sections are null when the command did not produce them.
struct ReportInputs {
  std::string command;
  std::string program;  // input path
  std::string verdict;  // repaired / unrepairable / inconclusive / valid / ...
  std::string message;
  std::vector<std::pair<std::string, double>> timings;    // phase -> seconds
  std::vector<std::pair<std::string, std::string>> info;  // free-form extras
  std::vector<std::pair<std::string, std::string>> artifacts;  // name -> path
  const TransitionGraph* graph = nullptr;  // labels for proof/cost rendering
  const RepairResult* repair = nullptr;
  const ConcretizeResult* conc = nullptr;
  const Verdict* exec = nullptr;  // run-style verdict
};

std::string report_json(const ReportInputs& in);
std::string report_text(const ReportInputs& in);

// Writes report.json and report.txt into out_dir (created if missing).
bool write_report(const ReportInputs& in, const std::string& out_dir, std::string* err);

// Proof table rendered over its node's assertion variables.
std::string proof_entry_text(const TransitionGraph& g, int node, const TruthTable& table);

}  // namespace bp
