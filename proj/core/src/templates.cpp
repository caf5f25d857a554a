#include "bprepair/templates.h"

#include <json.hpp>

namespace bp {

namespace {

bool parse_pin_value(const nlohmann::json& v, Rational& out) {
  if (v.is_number_integer()) {
    out = Rational(v.get<std::int64_t>());
    return true;
  }
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    size_t slash = s.find('/');
    try {
      if (slash == std::string::npos) {
        out = Rational(std::stoll(s));
      } else {
        std::int64_t den = std::stoll(s.substr(slash + 1));
        if (den == 0) return false;
        out = Rational(std::stoll(s.substr(0, slash)), den);
      }
      return true;
    } catch (const std::exception&) {
      return false;
    }
  }
  return false;
}

bool parse_template(const nlohmann::json& j, const std::string& filename, DiagnosticSink& sink,
                    LinearTemplate& out) {
  if (j.contains("kind") && j["kind"].get<std::string>() != "linear") {
    sink.error(filename, 0, 0, DiagCode::BadInput,
               "template: unknown kind '" + j["kind"].get<std::string>() + "'");
    return false;
  }
  if (j.contains("integer_only")) out.integer_only = j["integer_only"].get<bool>();
  if (j.contains("coeff_bound")) out.coeff_bound = j["coeff_bound"].get<int>();
  if (j.contains("den_bound")) out.den_bound = j["den_bound"].get<int>();
  if (out.coeff_bound < 0 || out.den_bound < 1) {
    sink.error(filename, 0, 0, DiagCode::BadInput, "template: bad search bounds");
    return false;
  }
  if (j.contains("freeze"))
    for (auto& v : j["freeze"]) out.freeze.insert(v.get<std::string>());
  if (j.contains("pins"))
    for (auto& [target, obj] : j["pins"].items())
      for (auto& [var, val] : obj.items()) {
        Rational r;
        if (!parse_pin_value(val, r)) {
          sink.error(filename, 0, 0, DiagCode::BadInput,
                     "template: bad pin value for '" + target + "." + var + "'");
          return false;
        }
        out.pins[target][var] = r;
      }
  return true;
}

}  // namespace

std::optional<TemplateAssignment> load_template_assignment(const std::string& json_text,
                                                           const std::string& filename,
                                                           DiagnosticSink& sink) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    sink.error(filename, 0, 0, DiagCode::BadInput, std::string("template: ") + e.what());
    return std::nullopt;
  }
  TemplateAssignment ta;
  try {
    if (j.contains("default")) {
      LinearTemplate t;
      if (!parse_template(j["default"], filename, sink, t)) return std::nullopt;
      ta.fallback = t;
    }
    if (j.contains("locations"))
      for (auto& [label, obj] : j["locations"].items()) {
        LinearTemplate t;
        if (!parse_template(obj, filename, sink, t)) return std::nullopt;
        ta.at_label[label] = t;
      }
  } catch (const std::exception& e) {
    sink.error(filename, 0, 0, DiagCode::BadInput, std::string("template: ") + e.what());
    return std::nullopt;
  }
  return ta;
}

bool in_guard_grammar(const CFormulaPtr& f) {
  switch (f->kind) {
    case CKind::Atom: return true;
    case CKind::Not: return in_guard_grammar(f->a);
    case CKind::And: return in_guard_grammar(f->a) && in_guard_grammar(f->b);
    default: return false;  // or / true / false
  }
}

}  // namespace bp
