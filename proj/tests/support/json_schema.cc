#include "json_schema.h"

#include <cmath>
#include <fstream>
#include <regex>
#include <set>

namespace riskx::testing {
namespace {

using nlohmann::json;

bool HasType(const json& instance, const std::string& type) {
  if (type == "object") return instance.is_object();
  if (type == "array") return instance.is_array();
  if (type == "string") return instance.is_string();
  if (type == "boolean") return instance.is_boolean();
  if (type == "null") return instance.is_null();
  if (type == "number") return instance.is_number();
  if (type == "integer") {
    if (instance.is_number_integer()) return true;
    if (!instance.is_number_float()) return false;
    const double value = instance.get<double>();
    return std::isfinite(value) && value == std::floor(value);
  }
  return false;
}

class Validator {
 public:
  explicit Validator(const json& root) : root_(root) {}

  void Check(const json& schema, const json& instance, const std::string& at) {
    static const std::set<std::string> kKnown = {
        "$schema", "title",    "description", "$defs",    "$ref",
        "type",    "enum",     "properties",  "required", "additionalProperties",
        "items",   "minItems", "maxItems",    "minimum",  "maximum",
        "pattern", "anyOf"};
    for (const auto& [key, value] : schema.items()) {
      if (!kKnown.count(key)) Fail(at, "unsupported keyword " + key);
    }
    if (auto ref = schema.find("$ref"); ref != schema.end()) {
      const std::string target = ref->get<std::string>();
      const std::string prefix = "#/$defs/";
      if (target.rfind(prefix, 0) != 0 ||
          !root_["$defs"].contains(target.substr(prefix.size()))) {
        Fail(at, "unresolvable $ref " + target);
        return;
      }
      Check(root_["$defs"][target.substr(prefix.size())], instance, at);
    }
    if (auto type = schema.find("type"); type != schema.end()) {
      bool ok = false;
      if (type->is_array()) {
        for (const json& t : *type) ok = ok || HasType(instance, t);
      } else {
        ok = HasType(instance, *type);
      }
      if (!ok) {
        Fail(at, "expected type " + type->dump() + ", got " + instance.dump());
        return;
      }
    }
    if (auto values = schema.find("enum"); values != schema.end()) {
      bool found = false;
      for (const json& value : *values) found = found || value == instance;
      if (!found) Fail(at, instance.dump() + " not in " + values->dump());
    }
    if (auto options = schema.find("anyOf"); options != schema.end()) {
      bool any = false;
      for (const json& option : *options) {
        Validator branch(root_);
        branch.Check(option, instance, at);
        any = any || branch.errors_.empty();
      }
      if (!any) Fail(at, "matches no anyOf branch");
    }
    if (instance.is_number()) {
      const double value = instance.get<double>();
      if (schema.contains("minimum") && value < schema["minimum"].get<double>()) {
        Fail(at, "below minimum");
      }
      if (schema.contains("maximum") && value > schema["maximum"].get<double>()) {
        Fail(at, "above maximum");
      }
    }
    if (instance.is_string() && schema.contains("pattern")) {
      if (!std::regex_search(instance.get<std::string>(),
                             std::regex(schema["pattern"].get<std::string>()))) {
        Fail(at, "does not match pattern");
      }
    }
    if (instance.is_array()) {
      if (schema.contains("minItems") &&
          instance.size() < schema["minItems"].get<std::size_t>()) {
        Fail(at, "too few items");
      }
      if (schema.contains("maxItems") &&
          instance.size() > schema["maxItems"].get<std::size_t>()) {
        Fail(at, "too many items");
      }
      if (auto items = schema.find("items"); items != schema.end()) {
        for (std::size_t i = 0; i < instance.size(); ++i) {
          Check(*items, instance[i], at + "/" + std::to_string(i));
        }
      }
    }
    if (instance.is_object()) {
      if (auto required = schema.find("required"); required != schema.end()) {
        for (const json& key : *required) {
          if (!instance.contains(key.get<std::string>())) {
            Fail(at, "missing " + key.get<std::string>());
          }
        }
      }
      const json properties = schema.value("properties", json::object());
      for (const auto& [key, value] : instance.items()) {
        if (properties.contains(key)) {
          Check(properties[key], value, at + "/" + key);
          continue;
        }
        if (auto extra = schema.find("additionalProperties");
            extra != schema.end()) {
          if (extra->is_boolean()) {
            if (!extra->get<bool>()) Fail(at, "unexpected property " + key);
          } else {
            Check(*extra, value, at + "/" + key);
          }
        }
      }
    }
  }

  std::vector<std::string> errors() && { return std::move(errors_); }

 private:
  void Fail(const std::string& at, const std::string& message) {
    errors_.push_back((at.empty() ? "/" : at) + ": " + message);
  }

  const json& root_;
  std::vector<std::string> errors_;
};

}  // namespace

std::vector<std::string> ValidateJsonSchema(const json& root,
                                            const json& schema,
                                            const json& instance) {
  Validator validator(root);
  validator.Check(schema, instance, "");
  return std::move(validator).errors();
}

std::vector<std::string> ValidateApiBody(const std::string& name,
                                         const json& body) {
  static const json root = [] {
    std::ifstream in(RISKX_SOURCE_DIR "/docs/schemas/api.schema.json");
    return json::parse(in);
  }();
  if (!root["$defs"].contains(name)) return {"no schema named " + name};
  return ValidateJsonSchema(root, root["$defs"][name], body);
}

}  // namespace riskx::testing
