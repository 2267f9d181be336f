#pragma once

// Validator for the JSON Schema subset used by schema/report.schema.json:
// type, enum, required, properties, additionalProperties=false, items,
// minItems, maxItems, oneOf and local $ref.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace schema_check {

using nlohmann::json;

inline bool has_type(const json &v, const std::string &t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  return false;
}

inline void validate(const json &v, const json &s, const json &root, const std::string &where,
                     std::vector<std::string> &errors) {
  if (s.contains("$ref")) {
    const std::string ref = s["$ref"];
    validate(v, root.at(json::json_pointer(ref.substr(1))), root, where, errors);
    return;
  }
  if (s.contains("type")) {
    bool ok = false;
    if (s["type"].is_array()) {
      for (const auto &t : s["type"]) ok = ok || has_type(v, t);
    } else {
      ok = has_type(v, s["type"]);
    }
    if (!ok) {
      errors.push_back(where + ": wrong type");
      return;
    }
  }
  if (s.contains("enum")) {
    bool found = false;
    for (const auto &e : s["enum"]) found = found || e == v;
    if (!found) errors.push_back(where + ": not in enum");
  }
  if (s.contains("oneOf")) {
    int matches = 0;
    for (const auto &alt : s["oneOf"]) {
      std::vector<std::string> sub;
      validate(v, alt, root, where, sub);
      matches += sub.empty();
    }
    if (matches != 1) errors.push_back(where + ": matches " + std::to_string(matches) + " of oneOf");
  }
  if (v.is_object()) {
    for (const auto &key : s.value("required", json::array())) {
      if (!v.contains(key)) errors.push_back(where + ": missing " + key.get<std::string>());
    }
    const auto props = s.value("properties", json::object());
    for (const auto &[key, val] : v.items()) {
      if (props.contains(key)) {
        validate(val, props[key], root, where + "." + key, errors);
      } else if (s.contains("additionalProperties") && s["additionalProperties"] == false) {
        errors.push_back(where + ": unexpected " + key);
      }
    }
  }
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) {
      errors.push_back(where + ": too few items");
    }
    if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>()) {
      errors.push_back(where + ": too many items");
    }
    if (s.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        validate(v[i], s["items"], root, where + "[" + std::to_string(i) + "]", errors);
      }
    }
  }
}

inline std::vector<std::string> validate_against_file(const json &doc, const std::string &path) {
  std::ifstream in(path);
  const json schema = json::parse(in);
  std::vector<std::string> errors;
  validate(doc, schema, schema, "$", errors);
  return errors;
}

}  // namespace schema_check
