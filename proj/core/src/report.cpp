#include "bprepair/report.h"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "bprepair/hoare.h"

namespace bp {

using nlohmann::json;

std::string proof_entry_text(const TransitionGraph& g, int node, const TruthTable& table) {
  return expr_to_string(synthesize_from_table(table, assertion_vars(g, node)));
}

namespace {

json repair_json(const ReportInputs& in) {
  const RepairResult& r = *in.repair;
  json j;
  j["budget_used"] = r.budget_used;
  j["total_cost"] = r.total_cost;
  j["num_assign"] = r.num_assign;
  j["num_assume"] = r.num_assume;
  j["solver_failure"] = r.solver_failure;
  if (!r.verdict_note.empty()) j["note"] = r.verdict_note;
  j["choices"] = json::array();
  for (const auto& c : r.choices)
    j["choices"].push_back({{"label", c.label}, {"schema", schema_name(c.schema)}, {"cost", c.cost}});
  j["budget_trail"] = json::array();
  for (const auto& a : r.attempts)
    j["budget_trail"].push_back({{"budget", a.budget},
                                 {"satisfiable", a.satisfiable},
                                 {"vars", a.vars},
                                 {"clauses", a.clauses},
                                 {"encode_seconds", a.encode_seconds},
                                 {"solve_seconds", a.solve_seconds},
                                 {"used_preferences", a.used_preferences}});
  if (in.graph) {
    json proof = json::object(), costs = json::object();
    for (const auto& [node, table] : r.proof.at)
      proof[in.graph->nodes[node].name] = proof_entry_text(*in.graph, node, table);
    for (const auto& [node, cost] : r.cost_valuation)
      costs[in.graph->nodes[node].name] = cost;
    j["proof"] = proof;
    j["cost_valuation"] = costs;
  }
  return j;
}

json conc_json(const ConcretizeResult& c) {
  json j;
  j["ok"] = c.ok;
  if (!c.error.empty()) j["error"] = c.error;
  j["changes"] = json::array();
  for (const auto& ch : c.changes) {
    json e{{"label", ch.label},
           {"schema", schema_name(ch.schema)},
           {"abstract", ch.abstract_text},
           {"statements", ch.statements},
           {"empty", ch.statements.empty()}};
    if (!ch.exprs.empty()) e["exprs"] = ch.exprs;
    if (!ch.note.empty()) e["note"] = ch.note;
    j["changes"].push_back(std::move(e));
  }
  json proof = json::object();
  for (const auto& [label, text] : c.proof) proof[label] = text;
  j["proof"] = proof;
  return j;
}

}  // namespace

std::string report_json(const ReportInputs& in) {
  json j;
  j["command"] = in.command;
  j["program"] = in.program;
  j["verdict"] = in.verdict;
  if (!in.message.empty()) j["message"] = in.message;
  json t = json::object();
  for (const auto& [phase, secs] : in.timings) t[phase] = secs;
  j["timings"] = t;
  for (const auto& [k, v] : in.info) j[k] = v;
  if (in.repair) j["repair"] = repair_json(in);
  if (in.conc) j["concretize"] = conc_json(*in.conc);
  if (in.exec) {
    json e{{"kind", verdict_kind_name(in.exec->kind)}};
    if (!in.exec->note.empty()) e["note"] = in.exec->note;
    if (in.graph && !in.exec->trace.empty()) e["trace"] = format_trace(*in.graph, *in.exec);
    j["execution"] = e;
  }
  if (!in.artifacts.empty()) {
    json a = json::object();
    for (const auto& [name, path] : in.artifacts) a[name] = path;
    j["artifacts"] = a;
  }
  return j.dump(2) + "\n";
}

namespace {

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

}  // namespace

std::string report_text(const ReportInputs& in) {
  std::string out;
  out += in.command + ": " + in.program + "\n";
  out += "verdict: " + in.verdict + "\n";
  if (!in.message.empty()) out += in.message + "\n";
  for (const auto& [k, v] : in.info) out += k + ": " + v + "\n";

  if (in.repair) {
    const RepairResult& r = *in.repair;
    out += "\nbudget trail:\n";
    for (const auto& a : r.attempts) {
      out += "  budget " + std::to_string(a.budget) + ": " +
             (a.satisfiable ? "sat  " : "unsat") + "  (vars " + std::to_string(a.vars) +
             ", clauses " + std::to_string(a.clauses) + ", encode " +
             fmt_seconds(a.encode_seconds) + ", solve " + fmt_seconds(a.solve_seconds) +
             (a.used_preferences ? ", preferred guards" : "") + ")\n";
    }
    if (!r.choices.empty()) {
      out += "\nchanges:\n";
      for (const auto& c : r.choices)
        out += "  " + c.label + ": " + schema_name(c.schema) + "  (cost " +
               std::to_string(c.cost) + ")\n";
    }
    out += "\n#asg " + std::to_string(r.num_assign) + "  #asm " + std::to_string(r.num_assume) +
           "  total cost " + std::to_string(r.total_cost) + "  budget used " +
           std::to_string(r.budget_used) + "\n";
    if (in.graph && !r.proof.at.empty()) {
      out += "\nproof:\n";
      for (const auto& [node, table] : r.proof.at)
        out += "  " + in.graph->nodes[node].name + ": " +
               proof_entry_text(*in.graph, node, table) + "\n";
      out += "cost valuation:\n";
      for (const auto& [node, cost] : r.cost_valuation)
        out += "  " + in.graph->nodes[node].name + ": " + std::to_string(cost) + "\n";
    }
    if (!r.verdict_note.empty()) out += "note: " + r.verdict_note + "\n";
  }

  if (in.conc) {
    const ConcretizeResult& c = *in.conc;
    out += "\nconcrete changes:\n";
    for (const auto& ch : c.changes) {
      out += "  " + ch.label + " (" + std::string(schema_name(ch.schema)) + "): " +
             ch.abstract_text + "\n";
      if (ch.statements.empty())
        out += "    -> empty set" + (ch.note.empty() ? "" : " (" + ch.note + ")") + "\n";
      for (const auto& s : ch.statements) out += "    -> " + s + "\n";
    }
    if (!c.proof.empty()) {
      out += "concrete proof:\n";
      for (const auto& [label, text] : c.proof) out += "  " + label + ": " + text + "\n";
    }
    if (!c.ok) out += "concretize error: " + c.error + "\n";
  }

  if (in.exec) {
    out += "\nexecution: " + std::string(verdict_kind_name(in.exec->kind)) + "\n";
    if (!in.exec->note.empty()) out += "  " + in.exec->note + "\n";
    if (in.graph && !in.exec->trace.empty()) out += format_trace(*in.graph, *in.exec);
  }

  if (!in.timings.empty()) {
    out += "\ntimings:";
    for (const auto& [phase, secs] : in.timings) out += "  " + phase + " " + fmt_seconds(secs);
    out += "\n";
  }
  if (!in.artifacts.empty()) {
    out += "artifacts:\n";
    for (const auto& [name, path] : in.artifacts) out += "  " + name + ": " + path + "\n";
  }
  return out;
}

bool write_report(const ReportInputs& in, const std::string& out_dir, std::string* err) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    if (err) *err = "cannot create '" + out_dir + "': " + ec.message();
    return false;
  }
  for (const char* name : {"report.json", "report.txt"}) {
    std::ofstream f(out_dir + "/" + name);
    if (!f) {
      if (err) *err = std::string("cannot write ") + name + " in '" + out_dir + "'";
      return false;
    }
    f << (std::string(name) == "report.json" ? report_json(in) : report_text(in));
  }
  return true;
}

}  // namespace bp
