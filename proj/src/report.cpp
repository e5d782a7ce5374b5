#include "otsys/report.hpp"

#include <fstream>

namespace otsys {

Check& Report::add(const std::string& name, bool ok, double value,
                   std::optional<double> tolerance, const std::string& note) {
  checks.push_back(Check{name, ok, value, tolerance, note});
  return checks.back();
}

std::string Report::first_failure() const {
  for (const Check& c : checks)
    if (!c.pass) return c.name;
  return "";
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["params"] = params;
  if (seed) j["seed"] = *seed;
  j["pass"] = pass();
  j["checks"] = nlohmann::json::array();
  for (const Check& c : checks) {
    nlohmann::json cj;
    cj["name"] = c.name;
    cj["pass"] = c.pass;
    cj["value"] = c.value;
    if (c.tolerance) cj["tolerance"] = *c.tolerance;
    if (!c.note.empty()) cj["note"] = c.note;
    j["checks"].push_back(cj);
  }
  if (!outputs.empty()) j["outputs"] = outputs;
  return j;
}

void Report::write_json_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << to_json().dump(2) << "\n";
}

namespace {

bool type_matches(const nlohmann::json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "number") return v.is_number();
  if (type == "integer") return v.is_number_integer() || v.is_number_unsigned();
  return false;
}

bool validate_node(const nlohmann::json& doc, const nlohmann::json& schema,
                   const std::string& path, std::string* error) {
  if (schema.contains("type")) {
    std::string t = schema["type"].get<std::string>();
    if (!type_matches(doc, t)) {
      if (error) *error = path + ": expected " + t;
      return false;
    }
  }
  if (schema.contains("required")) {
    for (const auto& key : schema["required"]) {
      if (!doc.contains(key.get<std::string>())) {
        if (error) *error = path + ": missing required key " + key.get<std::string>();
        return false;
      }
    }
  }
  if (schema.contains("properties") && doc.is_object()) {
    for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it) {
      if (doc.contains(it.key())) {
        if (!validate_node(doc[it.key()], it.value(), path + "/" + it.key(), error))
          return false;
      }
    }
  }
  if (schema.contains("items") && doc.is_array()) {
    size_t idx = 0;
    for (const auto& item : doc) {
      if (!validate_node(item, schema["items"],
                         path + "[" + std::to_string(idx++) + "]", error))
        return false;
    }
  }
  return true;
}

}  // namespace

bool validate_against_schema(const nlohmann::json& doc,
                             const nlohmann::json& schema, std::string* error) {
  return validate_node(doc, schema, "$", error);
}

}  // namespace otsys
