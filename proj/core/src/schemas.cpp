#include "bprepair/schemas.h"

#include <json.hpp>

namespace bp {

const char* schema_name(UpdateSchema u) {
  switch (u) {
    case UpdateSchema::Id: return "id";
    case UpdateSchema::AssignAssign: return "assign->assign";
    case UpdateSchema::AssignSkip: return "assign->skip";
    case UpdateSchema::AssumeAssume: return "assume->assume";
    case UpdateSchema::AssumeSkip: return "assume->skip";
    case UpdateSchema::CallCall: return "call->call";
    case UpdateSchema::CallSkip: return "call->skip";
  }
  return "?";
}

std::optional<UpdateSchema> schema_from_name(const std::string& name) {
  for (UpdateSchema u : {UpdateSchema::Id, UpdateSchema::AssignAssign, UpdateSchema::AssignSkip,
                         UpdateSchema::AssumeAssume, UpdateSchema::AssumeSkip,
                         UpdateSchema::CallCall, UpdateSchema::CallSkip})
    if (name == schema_name(u)) return u;
  return std::nullopt;
}

CostModel CostModel::defaults() {
  CostModel cm;
  for (UpdateSchema u : {UpdateSchema::AssignAssign, UpdateSchema::AssignSkip,
                         UpdateSchema::AssumeAssume, UpdateSchema::AssumeSkip,
                         UpdateSchema::CallCall, UpdateSchema::CallSkip})
    cm.default_costs[u] = 1;
  return cm;
}

int64_t CostModel::cost(UpdateSchema u, const std::string& label) const {
  if (u == UpdateSchema::Id) return 0;  // keeping a statement is always free
  for (const auto& o : overrides)
    if (o.schema == u && o.label == label) return o.cost;
  auto it = default_costs.find(u);
  return it == default_costs.end() ? 1 : it->second;
}

bool CostModel::allowed(UpdateSchema u) const {
  if (disabled.count(u)) return false;
  if (u == UpdateSchema::AssumeSkip) return enabled.count(u) > 0;  // opt-in
  return true;
}

std::optional<CostModel> load_cost_model(const std::string& json_text,
                                         const std::string& filename, DiagnosticSink& sink) {
  CostModel cm = CostModel::defaults();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    sink.error(filename, 0, 0, DiagCode::BadInput, std::string("cost model: ") + e.what());
    return std::nullopt;
  }
  auto parse_schema = [&](const std::string& name) -> std::optional<UpdateSchema> {
    auto u = schema_from_name(name);
    if (!u)
      sink.error(filename, 0, 0, DiagCode::BadInput,
                 "cost model: unknown schema '" + name + "'");
    return u;
  };
  try {
    if (j.contains("default_costs"))
      for (auto& [k, v] : j["default_costs"].items()) {
        auto u = parse_schema(k);
        if (!u) return std::nullopt;
        if (*u == UpdateSchema::Id && v.get<int64_t>() != 0) {
          sink.error(filename, 0, 0, DiagCode::BadInput, "cost model: id must cost 0");
          return std::nullopt;
        }
        if (v.get<int64_t>() < 0) {
          sink.error(filename, 0, 0, DiagCode::BadInput, "cost model: costs must be >= 0");
          return std::nullopt;
        }
        cm.default_costs[*u] = v.get<int64_t>();
      }
    if (j.contains("overrides"))
      for (auto& o : j["overrides"]) {
        auto u = parse_schema(o.at("schema").get<std::string>());
        if (!u) return std::nullopt;
        int64_t c = o.at("cost").get<int64_t>();
        if (c < 0 || (*u == UpdateSchema::Id && c != 0)) {
          sink.error(filename, 0, 0, DiagCode::BadInput, "cost model: bad override cost");
          return std::nullopt;
        }
        cm.overrides.push_back({o.at("label").get<std::string>(), *u, c});
      }
    if (j.contains("budget")) {
      cm.budget = j["budget"].get<int64_t>();
      if (*cm.budget < 0) {
        sink.error(filename, 0, 0, DiagCode::BadInput, "cost model: budget must be >= 0");
        return std::nullopt;
      }
    }
    if (j.contains("disabled_schemas"))
      for (auto& s : j["disabled_schemas"]) {
        auto u = parse_schema(s.get<std::string>());
        if (!u) return std::nullopt;
        cm.disabled.insert(*u);
      }
    if (j.contains("enabled_schemas"))
      for (auto& s : j["enabled_schemas"]) {
        auto u = parse_schema(s.get<std::string>());
        if (!u) return std::nullopt;
        cm.enabled.insert(*u);
      }
    if (j.contains("preferred_guards"))
      for (auto& [k, v] : j["preferred_guards"].items())
        cm.preferred_guards[k] = v.get<std::string>();
  } catch (const std::exception& e) {
    sink.error(filename, 0, 0, DiagCode::BadInput, std::string("cost model: ") + e.what());
    return std::nullopt;
  }
  if (cm.disabled.count(UpdateSchema::Id)) {
    sink.error(filename, 0, 0, DiagCode::BadInput, "cost model: id cannot be disabled");
    return std::nullopt;
  }
  return cm;
}

std::vector<UpdateSchema> applicable_schemas(const Statement& s, const CostModel& cm) {
  std::vector<UpdateSchema> out{UpdateSchema::Id};
  auto add = [&](UpdateSchema u) {
    if (cm.allowed(u)) out.push_back(u);
  };
  switch (statement_type(s)) {
    case StatementType::Assign:
      add(UpdateSchema::AssignAssign);
      add(UpdateSchema::AssignSkip);
      break;
    case StatementType::Assume:
      add(UpdateSchema::AssumeAssume);
      // A branch statement needs both successor edges; only a plain assume
      // can degenerate to skip.
      if (s.kind == StmtKind::Assume) add(UpdateSchema::AssumeSkip);
      break;
    case StatementType::Call:
      add(UpdateSchema::CallCall);
      add(UpdateSchema::CallSkip);
      break;
    default: break;  // skip, assert, return, goto stay as they are
  }
  return out;
}

}  // namespace bp
